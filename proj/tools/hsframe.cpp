// hsframe: generate, analyze, invert and perturb finite HS-frame families.
//
// Exit codes: 0 success, 2 validation/precondition, 3 numeric failure, 4 I/O.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hsframe/hsframe.hpp"

namespace {

using namespace hsframe;
using io::json;

enum ExitCode { kOk = 0, kValidation = 2, kNumeric = 3, kIo = 4 };

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HSFRAME_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw PreconditionError("HSFRAME_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void emit(const std::string& out, const std::string& content) {
  if (out.empty() || out == "-")
    std::cout << content;
  else
    io::write_atomic(out, content);
}

/// "1,2,3" or "1:0.5,2:-1" (re:im) into a vector of H.
HVector parse_vector(const std::string& text, Index dim_h) {
  std::vector<Scalar> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      const double re = std::stod(item.substr(0, colon));
      const double im = colon == std::string::npos ? 0.0 : std::stod(item.substr(colon + 1));
      entries.emplace_back(re, im);
    } catch (const std::exception&) {
      throw PreconditionError("--vector: cannot parse entry '" + item + "'");
    }
  }
  if (static_cast<Index>(entries.size()) != dim_h)
    throw PreconditionError("--vector: expected " + std::to_string(dim_h) + " entries, got " +
                            std::to_string(entries.size()));
  HVector f(dim_h);
  for (Index i = 0; i < dim_h; ++i) f(i) = entries[static_cast<std::size_t>(i)];
  return f;
}

struct GenerateOptions {
  std::string kind = "onb";
  Index dim_h = 0;
  Index dim_k = 1;
  std::size_t count = 0;
  std::string spectrum = "flat";
  double tail_ratio = 0.5;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_generate(const GenerateOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  HSFrameFamily family;
  if (o.kind == "onb") {
    family = onb_family(o.dim_h, o.dim_k);
  } else if (o.kind == "random") {
    family = random_family(o.dim_h, o.dim_k, o.count, SpectrumSpec::parse(o.spectrum), seed);
  } else if (o.kind == "riesz") {
    family = riesz_family(o.dim_h, o.dim_k, o.count, SpectrumSpec::parse(o.spectrum), seed);
  } else if (o.kind == "decaying") {
    family = decaying_family(o.dim_h, o.dim_k, o.count, o.tail_ratio, seed);
  } else {
    throw PreconditionError("unknown --kind '" + o.kind + "' (onb, random, riesz, decaying)");
  }
  io::save_family(family, o.out);
  const FrameBounds b = frame_bounds(family);
  std::cout << "generated " << o.kind << ": dim_h=" << family.dim_h() << " dim_k=" << family.dim_k()
            << " count=" << family.size() << " A=" << io::format_double(b.lower)
            << " B=" << io::format_double(b.upper) << " -> " << o.out << "\n";
  return kOk;
}

struct AnalyzeOptions {
  std::string input;
  std::string out;
  double rank_tol = kDefaultRankTol;
  int trials = 64;
  std::optional<std::uint64_t> seed;
};

int run_analyze(const AnalyzeOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const HSFrameFamily family = io::load_family(o.input);
  const FrameReport rep = classify(family, o.rank_tol);
  const RieszInequalityResult ri = riesz_inequality_check(family, o.trials, seed, o.rank_tol);
  const HsNormBound hs = frame_operator_hs_norm_bound(family);

  json doc = io::header_to_json({"analyze", io::utc_timestamp(), seed});
  doc["input"] = o.input;
  doc["dim_h"] = family.dim_h();
  doc["dim_k"] = family.dim_k();
  doc["count"] = family.size();
  doc["frame_report"] = io::frame_report_to_json(rep);
  doc["riesz_inequality"] = {{"min_ratio", ri.min_ratio},
                             {"max_ratio", ri.max_ratio},
                             {"lower_positive", ri.lower_positive},
                             {"riesz", ri.riesz},
                             {"samples", ri.samples}};
  doc["hs_norm_bound"] = {{"hs_norm", hs.hs_norm}, {"bound", hs.bound}, {"holds", hs.holds}};
  if (rep.frame) {
    const HSFrameFamily dual = canonical_dual(family, o.rank_tol);
    doc["canonical_dual_bounds"] = io::bounds_to_json(frame_bounds(dual));
    const AlternateDualCheck chk = verify_alternate_dual(family, dual, 8, seed);
    doc["canonical_dual_check"] = {{"is_dual", chk.is_dual}, {"max_residual", chk.max_residual}};
  } else {
    doc["canonical_dual_bounds"] = nullptr;
  }
  emit(o.out, doc.dump(2) + "\n");
  return kOk;
}

struct InvertOptions {
  std::string input;
  std::string vector;
  double lambda = 2.0;
  std::string schedule = "prefix:all";
  std::string out;
  double rank_tol = kDefaultRankTol;
  std::optional<std::uint64_t> seed;
};

int run_invert(const InvertOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const HSFrameFamily family = io::load_family(o.input);
  const SectionSchedule schedule = SectionSchedule::parse(o.schedule, family.size());
  HVector f;
  if (!o.vector.empty()) {
    f = parse_vector(o.vector, family.dim_h());
  } else {
    linalg::Rng rng(seed);
    f = linalg::random_gaussian(family.dim_h(), 1, rng).col(0);
  }
  const auto records = convergence_sweep(family, schedule, f, o.lambda, o.rank_tol);
  emit(o.out, io::convergence_csv(records, {"invert", io::utc_timestamp(), seed}));
  return kOk;
}

struct PerturbOptions {
  std::string input;
  std::string mode = "additive-analysis";
  std::string condition = "analysis";
  double magnitude = 0.0;
  std::optional<double> lambda1, lambda2, mu, nu;
  int trials = 256;
  double rank_tol = kDefaultRankTol;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_perturb(const PerturbOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const HSFrameFamily family = io::load_family(o.input);
  const PerturbationKind kind = parse_perturbation_kind(o.mode);
  const ConditionMode cond = parse_condition_mode(o.condition);
  const PerturbedFamily pf = perturb_family(family, kind, o.magnitude, seed);
  PerturbationConstants c = pf.constants;
  if (o.lambda1) c.lambda1 = *o.lambda1;
  if (o.lambda2) c.lambda2 = *o.lambda2;
  if (o.mu) c.mu = *o.mu;
  if (o.nu) c.nu = *o.nu;
  const PerturbationVerdict v = check_condition(cond, family, pf.family, c, o.trials, seed, o.rank_tol);

  json doc = io::header_to_json({"perturb", io::utc_timestamp(), seed});
  doc["input"] = o.input;
  doc["mode"] = to_string(kind);
  doc["magnitude"] = o.magnitude;
  doc["perturbed_indices"] = pf.perturbed;
  doc["verdict"] = io::verdict_to_json(v);
  const double m = analysis_deviation(family, pf.family);
  doc["analysis_deviation"] = m;
  if (m < v.reference.lower) {
    const FrameBounds simple = predicted_bounds_simple(v.reference.lower, v.reference.upper, m);
    doc["simple_corollary_bounds"] = io::bounds_to_json(simple);
  } else {
    doc["simple_corollary_bounds"] = nullptr;
  }
  emit(o.out, doc.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional Hilbert-Schmidt frame toolbox"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a frame-family file");
  g->add_option("--kind", gen.kind, "onb | random | riesz | decaying")->capture_default_str();
  g->add_option("--dim-h", gen.dim_h, "dimension of H")->required();
  g->add_option("--dim-k", gen.dim_k, "dimension of K")->capture_default_str();
  g->add_option("--count", gen.count, "number of maps");
  g->add_option("--spectrum", gen.spectrum, "flat[:v] | geometric:r | explicit:v1,v2,...")->capture_default_str();
  g->add_option("--tail-ratio", gen.tail_ratio, "tail decay for --kind decaying")->capture_default_str();
  g->add_option("--seed", gen.seed, "RNG seed (falls back to HSFRAME_SEED)");
  g->add_option("--out", gen.out, "output family file")->required();

  AnalyzeOptions ana;
  auto* a = app.add_subcommand("analyze", "Classify a family and report bounds and duals");
  a->add_option("--input", ana.input, "family file")->required();
  a->add_option("--out", ana.out, "JSON report (stdout if omitted)");
  a->add_option("--rank-tol", ana.rank_tol, "relative rank tolerance")->capture_default_str();
  a->add_option("--trials", ana.trials, "random samples for the Riesz inequality")->capture_default_str();
  a->add_option("--seed", ana.seed, "RNG seed (falls back to HSFRAME_SEED)");

  InvertOptions inv;
  auto* i = app.add_subcommand("invert", "Finite-section sweep towards S^{-1} f");
  i->add_option("--input", inv.input, "family file")->required();
  i->add_option("--vector", inv.vector, "f as comma list (re or re:im); random from --seed if omitted");
  i->add_option("--lambda", inv.lambda, "oversampling parameter (> 1)")->capture_default_str();
  i->add_option("--schedule", inv.schedule, "comma list of prefix lengths or prefix:all")->capture_default_str();
  i->add_option("--out", inv.out, "CSV report (stdout if omitted)");
  i->add_option("--rank-tol", inv.rank_tol, "relative rank tolerance")->capture_default_str();
  i->add_option("--seed", inv.seed, "RNG seed (falls back to HSFRAME_SEED)");

  PerturbOptions per;
  auto* p = app.add_subcommand("perturb", "Perturb a family and check the stability conditions");
  p->add_option("--input", per.input, "family file")->required();
  p->add_option("--mode", per.mode, "additive-analysis | scale | blockwise")->capture_default_str();
  p->add_option("--condition", per.condition, "analysis | synthesis | frame-operator | synthesis-coefficient")
      ->capture_default_str();
  p->add_option("--magnitude", per.magnitude, "perturbation size")->capture_default_str();
  p->add_option("--lambda1", per.lambda1, "override lambda1");
  p->add_option("--lambda2", per.lambda2, "override lambda2");
  p->add_option("--mu", per.mu, "override mu");
  p->add_option("--nu", per.nu, "override nu (frame-operator condition)");
  p->add_option("--trials", per.trials, "random samples")->capture_default_str();
  p->add_option("--rank-tol", per.rank_tol, "relative rank tolerance")->capture_default_str();
  p->add_option("--seed", per.seed, "RNG seed (falls back to HSFRAME_SEED)");
  p->add_option("--out", per.out, "JSON report (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*g) return run_generate(gen);
    if (*a) return run_analyze(ana);
    if (*i) return run_invert(inv);
    if (*p) return run_perturb(per);
  } catch (const io::IoError& e) {
    std::cerr << "hsframe: I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const io::ParseError& e) {
    std::cerr << "hsframe: parse error: " << e.what() << "\n";
    return kValidation;
  } catch (const io::ValidationError& e) {
    std::cerr << "hsframe: validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "hsframe: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "hsframe: numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
