// Acceptance suite: runs every quantitative criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "kgop/experiments.hpp"
#include "kgop/kernels.hpp"
#include "kgop/spectral.hpp"
#include "kgop/summability.hpp"
#include "kgop/symbol.hpp"

using namespace kgop;

namespace {

struct Criterion {
  std::string name;
  std::function<std::pair<bool, std::string>()> run;
};

std::string out_base() {
  const auto d = std::filesystem::temp_directory_path() / "kgop_acceptance";
  std::filesystem::create_directories(d);
  return d.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<bool, std::string> from_experiment(const std::string& name, exp::Config cfg = exp::default_config()) {
  const std::string out = out_base() + "/" + name;
  std::filesystem::remove_all(out);
  exp::ExperimentResult res = exp::run_experiment(name, cfg, out);
  const bool ok = res.status == exp::Status::ok;
  std::string detail = res.message.empty() ? "" : res.message;
  if (ok && res.metrics.is_object() && !res.metrics.empty()) {
    detail = res.metrics.dump();
    if (detail.size() > 160) detail = detail.substr(0, 157) + "...";
  }
  return {ok, detail};
}

double fmt_num(const nlohmann::json& j, const char* key) { return j.at(key).get<double>(); }

// c1: translation-norm law -----------------------------------------------

std::pair<bool, std::string> c1_translation_norm_law() {
  auto [ok, detail] = from_experiment("norm-growth");
  return {ok, detail};
}

// c2 rides on the same experiment but checks the power-iteration agreement
std::pair<bool, std::string> c2_power_iteration_agreement() {
  const std::string manifest_path = out_base() + "/norm-growth/manifest.json";
  if (!std::filesystem::exists(manifest_path)) return {false, "norm-growth manifest missing"};
  const auto manifest = nlohmann::json::parse(slurp(manifest_path));
  const double pi = fmt_num(manifest["metrics"], "power_norm");
  const double exact = fmt_num(manifest["metrics"], "power_exact");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "power %.8f vs exact %.8f", pi, exact);
  return {std::abs(pi - exact) <= 1e-3, buf};
}

std::pair<bool, std::string> c3_lemma36_margins() { return from_experiment("lemma36"); }

// c4: adjoint identities at stated tolerances ------------------------------

std::pair<bool, std::string> c4_adjoint_identities() {
  auto sp = Space::make(Grid::box(1, 0.02, 8.0), WeightSpec::relativistic(1.0));
  std::string detail;
  bool ok = true;

  // T_a* closed form: definitional check on the exact family
  Operator t = translation(sp, std::array<double, 1>{1.0});
  const double t_defect = adjoint_defect(t, 8, 911);
  ok = ok && t_defect < 1e-10;

  // Q* = M_E Q M_{1/E} for both backends
  for (auto backend : {DerivativeBackend::difference, DerivativeBackend::spectral}) {
    Operator q = position_operator(sp, 0, backend);
    std::vector<cplx> e_mult(sp->size()), einv(sp->size());
    for (std::size_t i = 0; i < sp->size(); ++i) {
      e_mult[i] = sp->energy_at(i);
      einv[i] = 1.0 / sp->energy_at(i);
    }
    Operator route = compose(multiplication(sp, e_mult), compose(q, multiplication(sp, einv)));
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      State x = gaussian_state(sp, std::array<double, 1>{0.4 * k - 0.8}, 1.0);
      State lhs = q.adjoint_apply(x);
      State rhs = route.apply(x);
      State diff = lhs - rhs;
      worst = std::max(worst, r_norm(diff) / r_norm(rhs));
    }
    const double tol = backend == DerivativeBackend::difference ? 1e-6 : 1e-10;
    ok = ok && worst < tol;
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%sQ%s %.2e", detail.empty() ? "" : " ",
                  backend == DerivativeBackend::difference ? "diff" : "spec", worst);
    detail += buf;
  }

  // definitional weighted-adjoint check across families
  State ker = gaussian_state(sp, std::array<double, 1>{0.0}, 0.9);
  Operator fam[] = {t, convolution(sp, ker.amp), multiplication(sp, ker.amp),
                    position_operator(sp, 0, DerivativeBackend::difference)};
  double fam_worst = 0.0;
  for (const Operator& a : fam) fam_worst = std::max(fam_worst, adjoint_defect(a, 6, 913));
  ok = ok && fam_worst < 1e-10;
  char buf[80];
  std::snprintf(buf, sizeof(buf), " t_defect %.2e families %.2e", t_defect, fam_worst);
  detail += buf;
  return {ok, detail};
}

std::pair<bool, std::string> c5_resolvent() { return from_experiment("resolvent-check"); }

std::pair<bool, std::string> c6_eigenresidual() { return from_experiment("eigenresidual"); }

// c7: symbol map identities -------------------------------------------------

std::pair<bool, std::string> c7_symbol_map() {
  auto sp = Space::make(Grid::box(1, 0.1, 10.0), WeightSpec::relativistic(1.0));
  bool ok = true;
  std::string detail;

  // sigma(T_a) = e^{i a x} to 1e-10
  const std::array<double, 1> a{1.0};
  symbol::SymbolFunction st = symbol::symbol_of(translation(sp, a));
  auto expected = symbol::translation_symbol(sp, a);
  double worst_t = 0.0;
  for (std::size_t i = 0; i < st.samples.size(); ++i)
    worst_t = std::max(worst_t, std::abs(st.samples[i] - expected[i]));
  ok = ok && worst_t < 1e-10;

  // contractivity across generated families
  State ker = gaussian_state(sp, std::array<double, 1>{0.0}, 0.8);
  struct Fam {
    Operator op;
    double norm;
  };
  std::vector<Fam> fams;
  Operator kf = convolution(sp, ker.amp);
  fams.push_back({kf, spectral::operator_norm(kf, 1e-6, 60000).value});
  Operator t1 = translation(sp, a);
  fams.push_back({t1, spectral::translation_norm_exact(sp, a)});
  Operator prod = compose(kf, t1);
  fams.push_back({prod, spectral::operator_norm(prod, 1e-6, 60000).value});
  Operator comb = lincomb({{cplx{0.5, 0.2}, kf}, {cplx{0.0, 1.0}, t1}});
  fams.push_back({comb, spectral::operator_norm(comb, 1e-6, 60000).value});
  double worst_contract = 0.0;
  for (const Fam& f : fams) {
    const double sup = symbol::symbol_of(f.op).sup_norm();
    worst_contract = std::max(worst_contract, sup - f.norm * (1.0 + 1e-4));
  }
  ok = ok && worst_contract <= 0.0;

  // homomorphism to 1e-8
  symbol::SymbolFunction skf = symbol::symbol_of(kf);
  symbol::SymbolFunction sprod = symbol::symbol_of(prod);
  double worst_h = 0.0;
  for (std::size_t i = 0; i < skf.samples.size(); ++i)
    worst_h = std::max(worst_h, std::abs(sprod.samples[i] - skf.samples[i] * st.samples[i]));
  ok = ok && worst_h < 1e-8 * std::max(1.0, skf.sup_norm());

  // flip involution to 1e-8: sigma(F A F) = conj(sigma(A))
  State cker(sp);
  const Grid& g = sp->grid();
  double c[1];
  for (std::size_t i = 0; i < cker.size(); ++i) {
    g.coords_of(i, c);
    cker.amp[i] = std::polar(std::exp(-c[0] * c[0] / 2.0), 0.7 * c[0]);
  }
  Operator kc = convolution(sp, cker.amp);
  symbol::SymbolFunction direct = symbol::symbol_of(kc);
  symbol::SymbolFunction flipped = symbol::symbol_of(flip_conjugate(kc));
  double worst_f = 0.0;
  for (std::size_t i = 0; i < direct.samples.size(); ++i)
    worst_f = std::max(worst_f, std::abs(flipped.samples[i] - std::conj(direct.samples[i])));
  ok = ok && worst_f < 1e-8 * std::max(1.0, direct.sup_norm());

  char buf[160];
  std::snprintf(buf, sizeof(buf), "T %.2e contract %.2e hom %.2e flip %.2e", worst_t, worst_contract,
                worst_h, worst_f);
  return {ok, buf};
}

std::pair<bool, std::string> c8_theorem38() { return from_experiment("theorem38"); }

std::pair<bool, std::string> c9_fejer() { return from_experiment("fejer"); }

std::pair<bool, std::string> c10_subspaces() { return from_experiment("subspace-angles"); }

std::pair<bool, std::string> c11_interval() { return from_experiment("interval-counterexample"); }

std::pair<bool, std::string> c12_compactness() { return from_experiment("compactness-probe"); }

std::pair<bool, std::string> c13_support() { return from_experiment("support-check"); }

// c14: determinism -----------------------------------------------------------

std::pair<bool, std::string> c14_determinism() {
  exp::Config cfg = exp::default_config();
  const std::string o1 = out_base() + "/det1";
  const std::string o2 = out_base() + "/det2";
  const std::string o3 = out_base() + "/det3";
  for (const auto& o : {o1, o2, o3}) std::filesystem::remove_all(o);
  exp::ExperimentResult r1 = exp::run_experiment("support-check", cfg, o1);
  exp::ExperimentResult r2 = exp::run_experiment("support-check", cfg, o2);
  if (r1.status != exp::Status::ok || r2.status != exp::Status::ok) return {false, "experiment failed"};
  if (slurp(o1 + "/support_check.csv") != slurp(o2 + "/support_check.csv"))
    return {false, "rerun CSVs differ"};
  exp::ExperimentResult r3 = exp::run_from_manifest(o1 + "/manifest.json", o3);
  if (r3.status != exp::Status::ok) return {false, "replay failed"};
  if (slurp(o1 + "/support_check.csv") != slurp(o3 + "/support_check.csv"))
    return {false, "replayed CSVs differ"};
  if (slurp(o1 + "/manifest.json") != slurp(o3 + "/manifest.json"))
    return {false, "replayed manifests differ"};
  return {true, "rerun and replay byte-identical"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"C1 translation-norm law (slope 0.5 +- 0.03; unit norm = sqrt golden ratio)", c1_translation_norm_law},
      {"C2 power iteration matches exact sup within 1e-3", c2_power_iteration_agreement},
      {"C3 weighted convolution bound dominates the norm (20 kernels)", c3_lemma36_margins},
      {"C4 adjoint identities (closed forms + definitional check)", c4_adjoint_identities},
      {"C5 resolvent residual < 1e-4 at h = 0.01", c5_resolvent},
      {"C6 approximate eigenvector residual slope -0.5 +- 0.1", c6_eigenresidual},
      {"C7 symbol map: evaluation, contractivity, homomorphism, flip", c7_symbol_map},
      {"C8 modulated-symbol derivative norms grow like sqrt(k)", c8_theorem38},
      {"C9 Cesaro means: exact coefficients, monotone error, < 1% at N = 64", c9_fejer},
      {"C10 subspace angles: disjoint intervals stay separated; slow weight merges", c10_subspaces},
      {"C11 interval counterexample growth ~ sqrt(harmonic number)", c11_interval},
      {"C12 compactness probe: stable sigma_1, zero flat-weight control", c12_compactness},
      {"C13 support preservation: right translations and positive kernels", c13_support},
      {"C14 determinism: byte-identical CSVs on rerun and replay", c14_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::pair<bool, std::string> r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s%s%s\n", r.first ? "PASS" : "FAIL", c.name.c_str(),
                r.second.empty() ? "" : " -- ", r.second.c_str());
    std::fflush(stdout);
    if (!r.first) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
