// Command-line front end: build fixtures, verify collar bounds, trace fibers.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "collar_forge/collar_forge.hpp"

namespace cf = collar_forge;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string fixture;
  double r = 1.0;
  double tilt = 0.2;
  double side = 2.0;
  int collars = 4;
  std::string order;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  std::size_t pairs = 10000;
  std::string out;
  std::string emit_quotients;
  std::optional<double> epsilon;
  std::optional<double> declared_C;
  std::size_t points = 5;
  std::size_t steps = 20;
};

/// Thrown for configuration problems; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_order(const std::string& text) {
  std::vector<std::size_t> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("--order expects comma-separated collar indices, got '" + text + "'");
    }
    if (pos != item.size() || v < 1) throw UsageError("--order indices are 1-based integers");
    order.push_back(static_cast<std::size_t>(v - 1));
  }
  return order;
}

cf::Fixture make_fixture(const RunConfig& cfg) {
  cf::Fixture f;
  try {
    if (cfg.fixture == "circle") f = cf::make_circle_in_disk(cfg.r);
    else if (cfg.fixture == "strip") f = cf::make_strip_two_collar(cfg.tilt);
    else if (cfg.fixture == "square") f = cf::make_square_boundary(cfg.side, cfg.collars);
    else if (cfg.fixture == "square-exterior") f = cf::make_square_exterior(cfg.side, cfg.collars);
    else throw UsageError("unknown fixture '" + cfg.fixture + "'");
    if (!cfg.order.empty()) f = cf::reorder(f, parse_order(cfg.order));
  } catch (const cf::Error& e) {
    if (e.kind() == cf::ErrorKind::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  if (cfg.declared_C) {
    if (!(*cfg.declared_C > 0.0)) throw UsageError("--declared-C must be positive");
    for (auto& c : f.collars) {
      c.declared.lipschitz = *cfg.declared_C;
      c.declared.bi_lipschitz.reset();
    }
  }
  return f;
}

cf::AssembleOptions assemble_options(const RunConfig& cfg) {
  cf::AssembleOptions o;
  o.pou.samples = std::max<std::size_t>(cfg.samples, 1);
  o.pou.seed = cfg.seed;
  o.collar.samples = std::max<std::size_t>(cfg.samples, 1);
  o.collar.injectivity_samples = 10 * o.collar.samples;
  o.collar.seed = cfg.seed;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  os << text;
}

int cmd_build(const RunConfig& cfg) {
  const cf::Fixture f = make_fixture(cfg);
  const cf::GlobalCollar gc = cf::assemble(f, assemble_options(cfg));
  const std::string path = cfg.out.empty() ? f.name + ".json" : cfg.out;
  write_text(path, cf::to_json(f).dump(2) + "\n");
  std::cout << "fixture " << f.name << ": " << gc.size() << " collar(s), validation passed on "
            << cfg.samples << " samples\n"
            << "wrote " << path << "\n";
  return kExitPass;
}

int verify_bicollar(const RunConfig& cfg) {
  const auto sq = cf::make_square_bicollar(cfg.side, cfg.collars, 0.5, assemble_options(cfg));
  cf::PairOptions po;
  po.pairs = cfg.pairs;
  po.seed = cfg.seed;
  cf::CrossPairOptions co;
  co.pairs = std::max<std::size_t>(cfg.pairs / 10, 1);
  co.seed = cfg.seed + 1;
  const auto pasting = cf::pasting_estimate(sq.glued, po, co);
  const auto est = cf::estimate_bicollar_constants(sq.glued, sq.local, po, co);
  const double delta = std::min(1.0, sq.interior.delta);
  const double iL_alpha = *std::max_element(est.constants.iL_alpha.begin(), est.constants.iL_alpha.end());
  const auto limits = cf::bicollar_epsilon(est.constants.L_c, iL_alpha, delta);
  const double eps = cfg.epsilon.value_or(limits.epsilon);
  cf::RestrictedBicollar rb;
  try {
    rb = cf::restrict_bicollar(sq.glued, eps, delta, est.constants);
  } catch (const cf::Error& e) {
    if (e.kind() == cf::ErrorKind::InvalidArgument) throw UsageError(e.what());
    throw;
  }
  const auto rm = cf::bicollar_map(rb.bicollar);
  auto rpairs = cf::sample_pairs(rm, po);
  const auto rcross = cf::sample_cross_pairs(rb.bicollar, co);
  rpairs.insert(rpairs.end(), rcross.begin(), rcross.end());
  const auto riL = cf::estimate_quotient(rm, rpairs, cf::QuotientKind::Inverse);
  cf::MidpointOptions mo;
  mo.pairs = po;
  mo.cross = co;
  const auto mid = cf::midpoint_alpha(sq.glued, mo);

  const bool pasting_ok = pasting.holds();
  const bool restrict_ok = std::isfinite(riL.value) && riL.value <= rb.corrected_bound + 1e-9;
  const bool verbatim_ok = riL.value <= rb.verbatim_bound + 1e-9;
  const bool midpoint_ok = mid.glued.value <= mid.induced_bound() + 1e-6;
  cf::Json j = {
      {"fixture", "square-bicollar"},
      {"pasting",
       {{"glued", pasting.glued.value}, {"plus", pasting.plus.value}, {"minus", pasting.minus.value},
        {"cross_pairs", pasting.cross_pairs}, {"pass", pasting_ok},
        {"witness", cf::to_json(*cf::make_witness(pasting.glued))}}},
      {"epsilon",
       {{"admissible", limits.epsilon}, {"binding", cf::to_string(limits.binding)},
        {"image_limit", limits.image_limit}, {"distance_limit", limits.distance_limit},
        {"used", eps}, {"delta", delta}}},
      {"restriction",
       {{"inverse_lipschitz", cf::number_json(riL.value)},
        {"verbatim_bound", rb.verbatim_bound}, {"verbatim_pass", verbatim_ok},
        {"corrected_bound", rb.corrected_bound}, {"pass", restrict_ok},
        {"image_condition", rb.image_condition}, {"distance_condition", rb.distance_condition},
        {"witness", cf::to_json(*cf::make_witness(riL))}}},
      {"midpoint",
       {{"alpha", mid.alpha}, {"inverse_lipschitz", cf::number_json(mid.glued.value)},
        {"induced_bound", cf::number_json(mid.induced_bound())}, {"skipped", mid.skipped},
        {"pass", midpoint_ok}}},
      {"notes",
       {"the published restriction bound uses max_a(1/bL_a); the corrected bound uses max_a bL_a"}}};
  const bool ok = pasting_ok && restrict_ok && midpoint_ok;
  j["passed"] = ok;
  const std::string text = j.dump(2) + "\n";
  if (cfg.out.empty()) std::cout << text;
  else write_text(cfg.out, text);
  std::cerr << "square-bicollar: " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitPass : kExitFail;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.fixture == "square-bicollar") return verify_bicollar(cfg);
  if (cfg.epsilon) throw UsageError("--epsilon applies to the square-bicollar fixture only");
  const cf::Fixture f = make_fixture(cfg);
  const cf::GlobalCollar gc = cf::assemble(f, assemble_options(cfg));
  cf::VerifyOptions vo;
  vo.pairs = cfg.pairs;
  vo.seed = cfg.seed;
  vo.keep_quotients = !cfg.emit_quotients.empty();
  const auto report = cf::verify(gc, vo);
  cf::Json j{{"fixture", f.name}, {"parameters", cf::params_json(f.params)}};
  j.update(cf::to_json(report));
  const std::string text = j.dump(2) + "\n";
  if (cfg.out.empty()) std::cout << text;
  else write_text(cfg.out, text);
  if (!cfg.emit_quotients.empty()) {
    std::ostringstream csv;
    cf::write_quotients_csv(csv, report.quotients);
    write_text(cfg.emit_quotients, csv.str());
  }
  for (const auto& v : report.verdicts)
    if (!v.pass) {
      std::cerr << "FAIL " << v.check << ": estimate " << cf::format_double(v.estimate) << " > bound "
                << cf::format_double(v.bound);
      if (v.witness)
        std::cerr << " witness " << cf::Json(v.witness->a).dump() << " "
                  << cf::Json(v.witness->b).dump();
      std::cerr << "\n";
    }
  std::cerr << f.name << ": " << (report.passed() ? "PASS" : "FAIL") << "\n";
  return report.passed() ? kExitPass : kExitFail;
}

int cmd_trace(const RunConfig& cfg) {
  const cf::Fixture f = make_fixture(cfg);
  const cf::GlobalCollar gc = cf::assemble(f, assemble_options(cfg));
  if (cfg.points == 0) throw UsageError("--points must be >= 1");
  if (cfg.steps == 0) throw UsageError("--steps must be >= 1");
  const auto pts = f.dom.sample_base(cfg.points, cfg.seed);
  std::ostringstream csv;
  cf::write_trajectory_csv(csv, gc, pts, cf::height_grid(cfg.steps));
  if (cfg.out.empty()) std::cout << csv.str();
  else write_text(cfg.out, csv.str());
  return kExitPass;
}

void add_fixture_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--fixture", cfg.fixture, "circle, strip, square, square-exterior")->required();
  sub->add_option("--r", cfg.r, "circle radius");
  sub->add_option("--tilt", cfg.tilt, "strip shear, |tilt| < 0.5");
  sub->add_option("--side", cfg.side, "square side length");
  sub->add_option("--collars", cfg.collars, "square collar count, 4 or 8");
  sub->add_option("--order", cfg.order, "collar enumeration, 1-based, e.g. 2,1");
  sub->add_option("--seed", cfg.seed, "sampling seed");
  sub->add_option("--samples", cfg.samples, "validation sample count");
  sub->add_option("--out", cfg.out, "output path");
  sub->add_option("--declared-C", cfg.declared_C, "override the declared collar Lipschitz constant");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global collars from local collars, with sampled Lipschitz verification"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto* build = app.add_subcommand("build", "build and validate a fixture, write its JSON");
  add_fixture_options(build, cfg);
  auto* verify = app.add_subcommand("verify", "measure constants and check the collar bounds");
  add_fixture_options(verify, cfg);
  verify->add_option("--pairs", cfg.pairs, "sampled pairs for the collar estimates");
  verify->add_option("--emit-quotients", cfg.emit_quotients, "write all sampled quotients as CSV");
  verify->add_option("--epsilon", cfg.epsilon, "bicollar restriction height (square-bicollar)");
  auto* trace = app.add_subcommand("trace", "write fiber trajectories as CSV");
  add_fixture_options(trace, cfg);
  trace->add_option("--points", cfg.points, "number of base points");
  trace->add_option("--steps", cfg.steps, "t-grid intervals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  try {
    if (*build) return cmd_build(cfg);
    if (*verify) return cmd_verify(cfg);
    return cmd_trace(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& w : e.witnesses()) std::cerr << "  witness " << cf::Json(w).dump() << "\n";
    return kExitFail;
  }
}
