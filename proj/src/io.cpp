#include "jumpresp/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "jumpresp/errors.hpp"

namespace jumpresp {

namespace {

static_assert(std::endian::native == std::endian::little, "binary trajectory format assumes a little-endian host");

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view field, const std::string& where) {
  const std::string text = trim(field);
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ValidationError(where + ": cannot parse number '" + text + "'");
  }
  if (!std::isfinite(value)) throw ValidationError(where + ": non-finite value '" + text + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  return out;
}

struct Header {
  double dt;
  Eigen::Index K;
};

// Reads "# key=value" lines until the first non-comment line, which is left in
// `first_data` (empty at end of input). Returns the line count consumed.
Header read_header(std::istream& in, const std::string& path, std::string& first_data, std::size_t& line_no) {
  std::map<std::string, std::string> keys;
  std::string line;
  first_data.clear();
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] != '#') {
      first_data = t;
      break;
    }
    const std::string body = trim(std::string_view(t).substr(1));
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed header line '" + t + "'");
    }
    keys[trim(std::string_view(body).substr(0, eq))] = trim(std::string_view(body).substr(eq + 1));
  }
  for (const char* key : {"dt", "K"}) {
    if (!keys.count(key)) throw ValidationError(path + ": missing header key '" + std::string(key) + "'");
  }
  Header h{};
  h.dt = parse_double(keys["dt"], path + ": header key 'dt'");
  const double k = parse_double(keys["K"], path + ": header key 'K'");
  if (k < 1.0 || k != std::floor(k)) throw ValidationError(path + ": header key 'K' must be a positive integer");
  h.K = static_cast<Eigen::Index>(k);
  if (!(h.dt > 0.0)) throw ValidationError(path + ": header key 'dt' must be positive");
  return h;
}

void write_header(std::ostream& os, const Trajectory& traj) {
  os << "# dt=" << format_double(traj.dt()) << "\n# K=" << traj.dim() << "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericalError("number formatting failed");
  return std::string(buf, ptr);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  write_header(out, traj);
  std::string row;
  for (Eigen::Index s = 0; s < traj.size(); ++s) {
    row.clear();
    for (Eigen::Index k = 0; k < traj.dim(); ++k) {
      if (k) row.push_back(',');
      row += format_double(traj.states()(s, k));
    }
    row.push_back('\n');
    out << row;
  }
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  const Header h = read_header(in, path, line, line_no);
  std::vector<double> data;
  std::size_t row = 0;
  auto consume = [&](const std::string& text) {
    const auto fields = split(text, ',');
    const std::string where = path + ":" + std::to_string(line_no) + " (row " + std::to_string(row + 1) + ")";
    if (static_cast<Eigen::Index>(fields.size()) != h.K) {
      throw ValidationError(where + ": expected " + std::to_string(h.K) + " columns, got " +
                            std::to_string(fields.size()));
    }
    for (const auto& f : fields) data.push_back(parse_double(f, where));
    ++row;
  };
  if (!line.empty()) consume(line);
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    consume(t);
  }
  StateMatrix states = Eigen::Map<StateMatrix>(data.data(), static_cast<Eigen::Index>(row), h.K);
  return Trajectory(h.dt, std::move(states), TrajectoryOrigin{"file:" + path, 0, 0});
}

void write_trajectory_binary(const std::string& path, const Trajectory& traj) {
  {
    std::ofstream hdr = open_out(path + ".hdr");
    write_header(hdr, traj);
  }
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out.write(reinterpret_cast<const char*>(traj.states().data()),
            static_cast<std::streamsize>(traj.states().size() * static_cast<Eigen::Index>(sizeof(double))));
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

Trajectory read_trajectory_binary(const std::string& path) {
  std::ifstream hdr = open_in(path + ".hdr");
  std::string first;
  std::size_t line_no = 0;
  const Header h = read_header(hdr, path + ".hdr", first, line_no);
  std::ifstream in = open_in(path, std::ios::in | std::ios::binary);
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  const std::size_t row_bytes = static_cast<std::size_t>(h.K) * sizeof(double);
  if (bytes % row_bytes != 0) throw ValidationError(path + ": size is not a whole number of rows");
  StateMatrix states(static_cast<Eigen::Index>(bytes / row_bytes), h.K);
  in.read(reinterpret_cast<char*>(states.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw ValidationError("failed reading '" + path + "'");
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    if (!states.row(r).allFinite()) throw ValidationError(path + ": row " + std::to_string(r) + " is not finite");
  }
  return Trajectory(h.dt, std::move(states), TrajectoryOrigin{"file:" + path, 0, 0});
}

namespace {
bool is_binary_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}
}  // namespace

void write_trajectory(const std::string& path, const Trajectory& traj) {
  if (is_binary_path(path)) {
    write_trajectory_binary(path, traj);
  } else {
    write_trajectory_csv(path, traj);
  }
}

Trajectory read_trajectory(const std::string& path) {
  return is_binary_path(path) ? read_trajectory_binary(path) : read_trajectory_csv(path);
}

void write_curve(std::ostream& os, const ResponseCurve& curve) {
  const Eigen::Index J = curve.outputs();
  os << "lag";
  for (Eigen::Index j = 1; j <= J; ++j) os << ",value_" << j;
  for (Eigen::Index j = 1; j <= J; ++j) os << ",stderr_" << j;
  os << "\n";
  for (std::size_t i = 0; i < curve.lags.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    os << format_double(curve.lags[i]);
    for (Eigen::Index j = 0; j < J; ++j) os << ',' << format_double(curve.values(r, j));
    for (Eigen::Index j = 0; j < J; ++j) os << ',' << format_double(curve.std_error(r, j));
    os << "\n";
  }
}

void write_curve(const std::string& path, const ResponseCurve& curve) {
  std::ofstream out = open_out(path);
  write_curve(out, curve);
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

ResponseCurve read_curve(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  const std::string header_line = trim(line);
  const auto header = split(header_line, ',');
  if (header.size() < 3 || header.size() % 2 != 1 || trim(header[0]) != "lag") {
    throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed curve header");
  }
  const std::size_t J = (header.size() - 1) / 2;
  for (std::size_t j = 0; j < J; ++j) {
    if (trim(header[1 + j]) != "value_" + std::to_string(j + 1) ||
        trim(header[1 + J + j]) != "stderr_" + std::to_string(j + 1)) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed curve header");
    }
  }
  std::vector<double> lags;
  std::vector<double> vals;
  std::vector<double> errs;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split(t, ',');
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw ValidationError(where + ": expected " + std::to_string(header.size()) + " columns, got " +
                            std::to_string(fields.size()));
    }
    lags.push_back(parse_double(fields[0], where));
    for (std::size_t j = 0; j < J; ++j) vals.push_back(parse_double(fields[1 + j], where));
    for (std::size_t j = 0; j < J; ++j) errs.push_back(parse_double(fields[1 + J + j], where));
  }
  ResponseCurve curve;
  curve.lags = std::move(lags);
  const auto n = static_cast<Eigen::Index>(curve.lags.size());
  const auto Jn = static_cast<Eigen::Index>(J);
  curve.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(vals.data(), n, Jn);
  curve.std_error = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(errs.data(), n, Jn);
  curve.validate();
  return curve;
}

}  // namespace jumpresp
