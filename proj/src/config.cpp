#include "jumpresp/config.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "json.hpp"
#include "jumpresp/errors.hpp"

namespace jumpresp {

namespace {

using json = nlohmann::json;

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Maps the JSON pointer of every value in already-valid JSON text to the line
// on which the value starts.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : text_(text) {
    value("");
  }

  int line(std::string ptr) const {
    while (true) {
      if (auto it = lines_.find(ptr); it != lines_.end()) return it->second;
      if (ptr.empty()) return 0;
      ptr.erase(ptr.rfind('/'));
    }
  }

 private:
  void ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_literal() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') ++pos_;
      if (pos_ < text_.size()) out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& ptr) {
    ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(ptr, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      ws();
      if (pos_ < text_.size() && text_[pos_] == '}') {
        ++pos_;
        return;
      }
      while (pos_ < text_.size()) {
        ws();
        const std::string key = string_literal();
        ws();
        ++pos_;  // ':'
        value(ptr + "/" + escape_token(key));
        ws();
        if (pos_ < text_.size() && text_[pos_++] == '}') return;
      }
    } else if (c == '[') {
      ++pos_;
      ws();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return;
      }
      for (std::size_t i = 0; pos_ < text_.size(); ++i) {
        value(ptr + "/" + std::to_string(i));
        ws();
        if (pos_ < text_.size() && text_[pos_++] == ']') return;
      }
    } else if (c == '"') {
      string_literal();
    } else {
      while (pos_ < text_.size() && !std::strchr(",]} \t\r\n", text_[pos_])) ++pos_;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

struct Context {
  const LineIndex* index;
  std::string source;
};

class Node {
 public:
  Node(const json& j, std::string ptr, const Context& ctx) : j_(&j), ptr_(std::move(ptr)), ctx_(&ctx) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(ctx_->source + ":" + std::to_string(ctx_->index->line(ptr_)) + ": " +
                          (ptr_.empty() ? "/" : ptr_) + ": " + msg);
  }

  const json& raw() const { return *j_; }
  const std::string& pointer() const { return ptr_; }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) fail("missing required key '" + key + "'");
    return Node((*j_)[key], ptr_ + "/" + escape_token(key), *ctx_);
  }

  std::optional<Node> opt(const std::string& key) const {
    if (!has(key) || (*j_)[key].is_null()) return std::nullopt;
    return at(key);
  }

  Node at(std::size_t i) const { return Node((*j_)[i], ptr_ + "/" + std::to_string(i), *ctx_); }

  std::size_t size() const { return j_->size(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }
  bool is_number() const { return j_->is_number(); }

  void allow_keys(std::initializer_list<const char*> keys) const {
    if (!j_->is_object()) fail("expected an object");
    for (const auto& item : j_->items()) {
      bool known = false;
      for (const char* k : keys) known = known || item.key() == k;
      if (!known) at(item.key()).fail("unknown key '" + item.key() + "'");
    }
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<std::int64_t>();
  }

  std::uint64_t unsigned_integer() const {
    if (!j_->is_number_unsigned() && !(j_->is_number_integer() && j_->get<std::int64_t>() >= 0)) {
      fail("expected a nonnegative integer");
    }
    return j_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  // A number is read as a length-1 vector.
  Vector vector() const {
    if (j_->is_number()) return Vector::Constant(1, number());
    if (!j_->is_array()) fail("expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) v[static_cast<Eigen::Index>(i)] = at(i).number();
    return v;
  }

  std::vector<double> numbers() const {
    const Vector v = vector();
    return {v.data(), v.data() + v.size()};
  }

  // Array of equal-length rows; a number is read as a 1x1 matrix.
  Matrix matrix() const {
    if (j_->is_number()) return Matrix::Constant(1, 1, number());
    if (!j_->is_array() || size() == 0) fail("expected a non-empty array of rows");
    const std::size_t rows = size();
    if (!at(0).is_array()) fail("expected an array of rows");
    const std::size_t cols = at(0).size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const Node row = at(r);
      if (!row.is_array()) row.fail("expected an array of numbers");
      if (row.size() != cols) {
        row.fail("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
      }
      for (std::size_t c = 0; c < cols; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).number();
      }
    }
    return m;
  }

  // Runs f, re-raising library validation errors at this node's location.
  template <class F>
  auto guard(F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ValidationError& e) {
      fail(e.what());
    }
  }

 private:
  const json* j_;
  std::string ptr_;
  const Context* ctx_;
};

std::string type_of(const Node& n) {
  if (n.is_string()) return n.string();
  return n.at("type").string();
}

ModelSpec parse_model(const Node& n) {
  const std::string type = n.at("type").string();
  if (type == "ou") {
    n.allow_keys({"type", "L", "G"});
    Matrix L = n.at("L").matrix();
    Matrix G = n.at("G").matrix();
    if (L.rows() != L.cols()) n.at("L").fail("L must be square");
    if (G.rows() != L.rows()) n.at("G").fail("G must have as many rows as L");
    return n.guard([&] { return ModelSpec::ou(std::move(L), std::move(G)); });
  }
  if (type == "double_well") {
    n.allow_keys({"type", "sigma"});
    const double sigma = n.at("sigma").number();
    return n.guard([&] { return ModelSpec::double_well(sigma); });
  }
  if (type == "lorenz96") {
    n.allow_keys({"type", "K", "forcing", "sigma"});
    const auto K = n.at("K").integer();
    const double F = n.at("forcing").number();
    const double sigma = n.opt("sigma") ? n.at("sigma").number() : 0.0;
    return n.guard([&] { return ModelSpec::lorenz96(static_cast<int>(K), F, sigma); });
  }
  n.at("type").fail("unknown model type '" + type + "' (expected ou, double_well or lorenz96)");
}

GaussianDensity parse_gaussian(const Node& n) {
  n.allow_keys({"type", "mean", "cov"});
  Vector mean = n.at("mean").vector();
  Matrix cov = n.at("cov").matrix();
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    n.at("cov").fail("cov must be " + std::to_string(mean.size()) + "x" + std::to_string(mean.size()));
  }
  return n.guard([&] { return GaussianDensity(std::move(mean), std::move(cov)); });
}

std::pair<std::vector<double>, std::vector<GaussianDensity>> parse_components(const Node& n) {
  const std::vector<double> weights = n.at("weights").numbers();
  const Node comps = n.at("components");
  if (!comps.is_array() || comps.size() == 0) comps.fail("expected a non-empty array of components");
  if (comps.size() != weights.size()) n.at("weights").fail("one weight per component is required");
  std::vector<GaussianDensity> out;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    out.push_back(parse_gaussian(comps.at(i)));
    if (out.back().dim() != out.front().dim()) comps.at(i).fail("component dimensions differ");
  }
  return {weights, std::move(out)};
}

GaussianMixture parse_mixture(const Node& n) {
  n.allow_keys({"type", "weights", "components"});
  auto [weights, comps] = parse_components(n);
  return n.guard([&] { return GaussianMixture(std::move(weights), std::move(comps)); });
}

Density parse_density(const Node& n) {
  const std::string type = n.at("type").string();
  if (type == "gaussian") return parse_gaussian(n);
  if (type == "mixture") return parse_mixture(n);
  n.at("type").fail("unknown density type '" + type + "' (expected gaussian or mixture)");
}

JumpLaw parse_law(const Node& n) {
  const std::string type = n.at("type").string();
  if (type == "gaussian") return parse_gaussian(n);
  if (type == "mixture") return parse_mixture(n);
  if (type == "discrete") {
    n.allow_keys({"type", "atoms", "probs"});
    const Node atoms = n.at("atoms");
    if (!atoms.is_array() || atoms.size() == 0) atoms.fail("expected a non-empty array of atoms");
    std::vector<Vector> values;
    for (std::size_t i = 0; i < atoms.size(); ++i) values.push_back(atoms.at(i).vector());
    std::vector<double> probs = n.at("probs").numbers();
    if (probs.size() != values.size()) n.at("probs").fail("one probability per atom is required");
    return n.guard([&] { return DiscreteLaw(std::move(values), std::move(probs)); });
  }
  n.at("type").fail("unknown jump law type '" + type + "' (expected discrete, gaussian or mixture)");
}

AffineJumpMap parse_jump(const Node& n) {
  n.allow_keys({"h", "H", "Hstar"});
  Vector h = n.at("h").vector();
  const Eigen::Index K = h.size();
  Matrix H = Matrix::Zero(K, K);
  if (auto node = n.opt("H")) {
    H = node->matrix();
    if (H.rows() != K || H.cols() != K) node->fail("H must be " + std::to_string(K) + "x" + std::to_string(K));
  }
  Matrix Hstar(K, 0);
  if (auto node = n.opt("Hstar")) {
    Hstar = node->matrix();
    if (Hstar.rows() != K) node->fail("Hstar must have " + std::to_string(K) + " rows");
  }
  return n.guard([&] { return AffineJumpMap(std::move(h), std::move(H), std::move(Hstar)); });
}

IntensityShape parse_shape(const Node& n) {
  const std::string type = type_of(n);
  if (type == "constant") return IntensityShape::constant();
  if (type == "bump") {
    n.allow_keys({"type", "center", "cov"});
    Vector center = n.at("center").vector();
    Matrix cov = n.at("cov").matrix();
    if (cov.rows() != center.size() || cov.cols() != center.size()) n.at("cov").fail("cov must match center");
    return n.guard([&] { return IntensityShape::bump(std::move(center), std::move(cov)); });
  }
  if (type == "bump_mixture") {
    n.allow_keys({"type", "weights", "components"});
    auto [weights, comps] = parse_components(n);
    return n.guard([&] { return IntensityShape::bump_mixture(std::move(weights), std::move(comps)); });
  }
  n.fail("unknown intensity shape '" + type + "' (expected constant, bump or bump_mixture)");
}

IntensityModel parse_intensity(const Node& n) {
  n.allow_keys({"alpha", "eta", "g"});
  const double alpha = n.at("alpha").number();
  TimeProfile eta = TimeProfile::constant(1.0);
  if (auto node = n.opt("eta")) {
    if (node->is_number()) {
      const double v = node->number();
      eta = node->guard([&] { return TimeProfile::constant(v); });
    } else {
      const Matrix table = node->matrix();
      if (table.cols() != 2) node->fail("eta table rows must be [t, value] pairs");
      std::vector<std::pair<double, double>> pts;
      for (Eigen::Index r = 0; r < table.rows(); ++r) pts.emplace_back(table(r, 0), table(r, 1));
      eta = node->guard([&] { return TimeProfile::table(std::move(pts)); });
    }
  }
  IntensityShape g = IntensityShape::constant();
  if (auto node = n.opt("g")) g = parse_shape(*node);
  return n.guard([&] { return IntensityModel(alpha, std::move(eta), std::move(g)); });
}

TestFunction parse_psi(const Node& n) {
  const std::string type = type_of(n);
  if (type == "identity") return TestFunction::identity();
  if (type == "energy") return TestFunction::energy();
  if (type == "component") {
    n.allow_keys({"type", "index"});
    return TestFunction::component(static_cast<int>(n.at("index").integer()));
  }
  if (type == "quadratic") {
    n.allow_keys({"type", "i", "j"});
    return TestFunction::quadratic(static_cast<int>(n.at("i").integer()), static_cast<int>(n.at("j").integer()));
  }
  n.fail("unknown psi '" + type + "' (expected identity, component, quadratic or energy)");
}

std::vector<double> parse_lags(const Node& n) {
  std::vector<double> lags;
  if (n.is_array()) {
    lags = n.numbers();
  } else {
    n.allow_keys({"start", "stop", "step"});
    const double start = n.opt("start") ? n.at("start").number() : 0.0;
    const double stop = n.at("stop").number();
    const double step = n.at("step").number();
    if (!(step > 0.0)) n.at("step").fail("step must be positive");
    if (stop < start) n.at("stop").fail("stop must not precede start");
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9));
    for (std::int64_t i = 0; i <= count; ++i) lags.push_back(start + static_cast<double>(i) * step);
  }
  if (lags.empty()) n.fail("at least one lag is required");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] < 0.0) n.fail("lags must be nonnegative");
    if (i > 0 && !(lags[i] > lags[i - 1])) n.fail("lags must be strictly increasing");
  }
  return lags;
}

TrajectorySettings parse_trajectory(const Node& n) {
  n.allow_keys({"input", "dt", "steps", "burn_in", "exact_ou", "x0"});
  TrajectorySettings t;
  if (auto v = n.opt("input")) t.input = v->string();
  if (auto v = n.opt("dt")) {
    t.dt = v->number();
    if (!(t.dt > 0.0)) v->fail("dt must be positive");
  }
  if (auto v = n.opt("steps")) {
    t.steps = v->integer();
    if (t.steps < 1) v->fail("steps must be at least 1");
  }
  if (auto v = n.opt("burn_in")) {
    t.burn_in = v->integer();
    if (t.burn_in < 0) v->fail("burn_in must be nonnegative");
  }
  if (auto v = n.opt("exact_ou")) t.exact_ou = v->boolean();
  if (auto v = n.opt("x0")) t.x0 = v->vector();
  return t;
}

P0Settings parse_p0(const Node& n) {
  P0Settings p;
  const std::string type = type_of(n);
  if (type == "exact") {
    p.kind = P0Settings::Kind::kExact;
  } else if (type == "quasi_gaussian") {
    p.kind = P0Settings::Kind::kQuasiGaussian;
  } else if (type == "mixture_fit") {
    p.kind = P0Settings::Kind::kMixtureFit;
    if (!n.is_string()) {
      n.allow_keys({"type", "components"});
      if (auto v = n.opt("components")) {
        const auto c = v->integer();
        if (c < 1) v->fail("components must be at least 1");
        p.components = static_cast<int>(c);
      }
    }
  } else if (type == "explicit") {
    p.kind = P0Settings::Kind::kExplicit;
    n.allow_keys({"type", "density"});
    p.density = parse_density(n.at("density"));
  } else {
    n.fail("unknown p0 type '" + type + "' (expected exact, quasi_gaussian, mixture_fit or explicit)");
  }
  return p;
}

void parse_estimator(const Node& n, ExperimentConfig& cfg) {
  n.allow_keys({"batch_length", "tcorr", "max_skip_fraction", "convolve"});
  if (auto v = n.opt("batch_length")) {
    cfg.estimator.batch_length = v->integer();
    if (cfg.estimator.batch_length < 0) v->fail("batch_length must be nonnegative");
  }
  if (auto v = n.opt("tcorr")) {
    cfg.estimator.tcorr = v->number();
    if (!(*cfg.estimator.tcorr > 0.0)) v->fail("tcorr must be positive");
  }
  if (auto v = n.opt("max_skip_fraction")) {
    cfg.estimator.max_skip_fraction = v->number();
    if (cfg.estimator.max_skip_fraction < 0.0 || cfg.estimator.max_skip_fraction > 1.0) {
      v->fail("max_skip_fraction must lie in [0, 1]");
    }
  }
  if (auto v = n.opt("convolve")) cfg.convolve = v->boolean();
}

void parse_ensemble(const Node& n, EnsembleConfig& e) {
  n.allow_keys({"members", "dt", "horizon", "common_noise", "output_stride", "burn_in", "thin", "pilot_steps"});
  if (auto v = n.opt("members")) e.members = v->integer();
  if (auto v = n.opt("dt")) e.dt = v->number();
  if (auto v = n.opt("horizon")) e.horizon = v->number();
  if (auto v = n.opt("common_noise")) e.common_noise = v->boolean();
  if (auto v = n.opt("output_stride")) e.output_stride = v->integer();
  if (auto v = n.opt("burn_in")) e.burn_in = v->integer();
  if (auto v = n.opt("thin")) e.thin = v->integer();
  if (auto v = n.opt("pilot_steps")) e.pilot_steps = v->integer();
  n.guard([&] {
    e.validate();
    return 0;
  });
}

OracleSettings parse_oracle(const Node& n) {
  OracleSettings o;
  n.allow_keys({"curve"});
  if (auto v = n.opt("curve")) {
    const std::string c = v->string();
    if (c == "response") {
      o.curve = OracleSettings::Curve::kResponse;
    } else if (c == "exact_mean") {
      o.curve = OracleSettings::Curve::kExactMean;
    } else if (c == "leading_order") {
      o.curve = OracleSettings::Curve::kLeadingOrder;
    } else {
      v->fail("unknown oracle curve '" + c + "' (expected response, exact_mean or leading_order)");
    }
  }
  return o;
}

Scenario parse_scenario(const Node& n) {
  const std::string s = n.string();
  if (s == "deterministic") return Scenario::kDeterministic;
  if (s == "random") return Scenario::kRandom;
  if (s == "random_time") return Scenario::kRandomTime;
  n.fail("unknown scenario '" + s + "' (expected deterministic, random or random_time)");
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kDeterministic:
      return "deterministic";
    case Scenario::kRandom:
      return "random";
    case Scenario::kRandomTime:
      return "random_time";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!model) return;
  const Eigen::Index K = model->dim();
  const std::string k = std::to_string(K);
  if (jump && jump->dim() != K) throw ValidationError("jump.h has dimension " + std::to_string(jump->dim()) + ", model has K=" + k);
  if (jump && law && law_dim(*law) != jump->noise_dim()) {
    throw ValidationError("jump_law dimension " + std::to_string(law_dim(*law)) + " does not match the " +
                          std::to_string(jump->noise_dim()) + " columns of jump.Hstar");
  }
  if (intensity && !intensity->gshape().is_constant() && intensity->gshape().bumps().front().dim() != K) {
    throw ValidationError("intensity.g has dimension " + std::to_string(intensity->gshape().bumps().front().dim()) +
                          ", model has K=" + k);
  }
  if (p0.density && density_dim(*p0.density) != K) throw ValidationError("p0.density dimension does not match K=" + k);
  if (trajectory.x0.size() != 0 && trajectory.x0.size() != K) {
    throw ValidationError("trajectory.x0 has dimension " + std::to_string(trajectory.x0.size()) + ", model has K=" + k);
  }
  psi.validate(K);
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  const LineIndex index(text);
  const Context ctx{&index, source};
  const Node n(root, "", ctx);
  n.allow_keys({"model", "jump", "jump_law", "intensity", "scenario", "psi", "lags", "trajectory", "p0", "estimator",
                "ensemble", "oracle", "seed", "threads", "output"});

  ExperimentConfig cfg;
  if (auto v = n.opt("model")) cfg.model = parse_model(*v);
  if (auto v = n.opt("jump")) cfg.jump = parse_jump(*v);
  if (auto v = n.opt("jump_law")) cfg.law = parse_law(*v);
  if (auto v = n.opt("intensity")) cfg.intensity = parse_intensity(*v);
  if (auto v = n.opt("scenario")) cfg.scenario = parse_scenario(*v);
  if (auto v = n.opt("psi")) cfg.psi = parse_psi(*v);
  if (auto v = n.opt("lags")) cfg.lags = parse_lags(*v);
  if (auto v = n.opt("trajectory")) cfg.trajectory = parse_trajectory(*v);
  if (auto v = n.opt("p0")) cfg.p0 = parse_p0(*v);
  if (auto v = n.opt("estimator")) parse_estimator(*v, cfg);
  if (auto v = n.opt("ensemble")) parse_ensemble(*v, cfg.ensemble);
  if (auto v = n.opt("oracle")) cfg.oracle = parse_oracle(*v);
  if (auto v = n.opt("seed")) cfg.seed = v->unsigned_integer();
  if (auto v = n.opt("threads")) {
    const auto t = v->integer();
    if (t < 1) v->fail("threads must be at least 1");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (auto v = n.opt("output")) cfg.output = v->string();

  // Cross-references, reported at the dependent key.
  if (cfg.model) {
    const Eigen::Index K = cfg.model->dim();
    const std::string k = ", model has K=" + std::to_string(K);
    if (cfg.jump && cfg.jump->dim() != K) {
      n.at("jump").at("h").fail("dimension " + std::to_string(cfg.jump->dim()) + k);
    }
    if (cfg.intensity && !cfg.intensity->gshape().is_constant() &&
        cfg.intensity->gshape().bumps().front().dim() != K) {
      n.at("intensity").at("g").fail("dimension " + std::to_string(cfg.intensity->gshape().bumps().front().dim()) + k);
    }
    if (cfg.p0.density && density_dim(*cfg.p0.density) != K) {
      n.at("p0").at("density").fail("dimension " + std::to_string(density_dim(*cfg.p0.density)) + k);
    }
    if (cfg.trajectory.x0.size() != 0 && cfg.trajectory.x0.size() != K) {
      n.at("trajectory").at("x0").fail("dimension " + std::to_string(cfg.trajectory.x0.size()) + k);
    }
    if (n.opt("psi")) n.at("psi").guard([&] {
        cfg.psi.validate(K);
        return 0;
      });
  }
  if (cfg.jump && cfg.law && law_dim(*cfg.law) != cfg.jump->noise_dim()) {
    n.at("jump_law").fail("dimension " + std::to_string(law_dim(*cfg.law)) + " does not match the " +
                          std::to_string(cfg.jump->noise_dim()) + " columns of jump.Hstar");
  }
  cfg.ensemble.seed = cfg.seed;
  cfg.ensemble.threads = cfg.threads;
  cfg.estimator.threads = cfg.threads;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace jumpresp
