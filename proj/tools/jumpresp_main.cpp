#include "jumpresp/cli.hpp"

int main(int argc, char** argv) { return jumpresp::run_cli(argc, argv); }
