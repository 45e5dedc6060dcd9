#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "idealkit/constructions.hpp"
#include "idealkit/json_io.hpp"
#include "idealkit/kernels.hpp"
#include "idealkit/parser.hpp"
#include "idealkit/pathology.hpp"
#include "idealkit/verify.hpp"
#include "idealkit/witness.hpp"

namespace {

using namespace idealkit;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct GlobalOptions {
  bool json = false;
  Nat window = SubmeasureExpr::kDefaultWindow;
  std::uint64_t seed = 1;
  std::size_t budget = 10000;
  double tolerance = 1e-9;
  int threads = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// shared report skeleton; wall time goes to stderr only so JSON stays
// byte-identical across runs
void emit(const GlobalOptions& opt, Json&& report, const std::string& human) {
  if (opt.json) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

Json base_report(const std::string& command, const std::string& digest_input) {
  Json j;
  j["command"] = command;
  j["inputsDigest"] = hex64(fnv1a(digest_input));
  return j;
}

QValue rational_flag(const std::string& text) {
  return QValue::rational(parse_rational(text));
}

std::vector<Nat> parse_nat_list(const std::string& csv) {
  std::vector<Nat> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<Nat>(std::stoull(item)));
  }
  return out;
}

std::vector<Rat> parse_rat_list(const std::string& csv) {
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_rational(item));
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ----- eval -----

int cmd_eval(const GlobalOptions& opt, const std::string& file, const std::string& set) {
  std::string text = read_file(file);
  ExprPtr expr = parse_expr(text, opt.window);
  AnySet a = parse_set(set);
  QValue v = expr->eval(a);
  Json j = base_report("eval", text + "|" + set);
  j["kind"] = "eval";
  j["expr"] = expr->to_dsl();
  j["set"] = anyset_to_json(a);
  j["value"] = qvalue_to_json(v);
  j["outcome"] = "ok";
  emit(opt, std::move(j), v.to_string() + "\n");
  return kExitOk;
}

// ----- norm-profile -----

int cmd_norm_profile(const GlobalOptions& opt, const std::string& file,
                     const std::string& set, std::size_t depth) {
  std::string text = read_file(file);
  ExprPtr expr = parse_expr(text, opt.window);
  AnySet a = parse_set(set);
  if (depth == static_cast<std::size_t>(-1)) depth = set_size(a);
  NormProfile profile = norm_profile(expr, a, depth);
  Json j = base_report("norm-profile", text + "|" + set);
  j["kind"] = "norm-profile";
  j["expr"] = expr->to_dsl();
  j["set"] = anyset_to_json(a);
  Json values = Json::array();
  std::string human;
  for (std::size_t n = 0; n < profile.values.size(); ++n) {
    values.push_back(qvalue_to_json(profile.values[n]));
    human += std::to_string(n) + "\t" + profile.values[n].to_string() + "\n";
  }
  j["values"] = values;
  j["outcome"] = "ok";
  emit(opt, std::move(j), human);
  return kExitOk;
}

// ----- build -----

int cmd_build(const GlobalOptions& opt, const std::string& name, Nat kmax, Nat mmax,
              Nat nmax, Nat depth, const std::string& iota_csv,
              const std::string& seeds_csv, const std::string& of_file,
              const std::string& weights_csv, Nat length) {
  Json j = base_report("build " + name, name);
  j["kind"] = "build";
  j["name"] = name;
  std::string human;

  auto one_expr = [&](const ExprPtr& e) {
    j["expr"] = e->to_dsl();
    human = e->to_dsl() + "\n";
  };

  if (name == "nu-example") {
    NuExample ex = build_nu_example(kmax, mmax, opt.window);
    Json nus = Json::array(), mus = Json::array();
    for (const auto& row : ex.rows) {
      nus.push_back(row.nu->to_dsl());
      mus.push_back(row.mu->to_dsl());
      human += row.nu->to_dsl() + "\n";
    }
    j["nus"] = nus;
    j["mus"] = mus;
  } else if (name == "capped-example") {
    one_expr(build_capped_example(h_row_partition(nmax, opt.window), opt.window));
  } else if (name == "interval-dl") {
    std::vector<Nat> iota = iota_csv.empty() ? default_interval_cuts(opt.window, 8)
                                             : parse_nat_list(iota_csv);
    one_expr(interval_dl_example(iota, opt.window));
  } else if (name == "hat-of") {
    if (of_file.empty()) throw Error(ErrorKind::Usage, "hat-of needs --of FILE");
    one_expr(hat_of(parse_expr(read_file(of_file), opt.window), opt.window));
  } else if (name == "mz-partition") {
    MzPartition part = mz_partition(depth, opt.window);
    Json blocks = Json::array(), sizes = Json::array();
    for (std::size_t n = 0; n < part.blocks.size(); ++n) {
      blocks.push_back(gridset_to_json(part.blocks[n]));
      sizes.push_back(part.sizes[n]);
      human += "m[" + std::to_string(n) + "] = " + std::to_string(part.sizes[n]) + "\n";
    }
    j["blocks"] = blocks;
    j["sizes"] = sizes;
  } else if (name == "ad-family") {
    ADFamily fam = ad_family(split_csv(seeds_csv), depth, opt.window);
    Json sets = Json::array();
    for (std::size_t i = 0; i < fam.sets.size(); ++i) {
      sets.push_back(natset_to_json(fam.sets[i]));
      human += fam.seeds[i] + ": ";
      for (Nat x : fam.sets[i]) human += std::to_string(x) + " ";
      human += "\n";
    }
    j["sets"] = sets;
  } else if (name == "dirac-fin") {
    one_expr(dirac_examples(opt.window).first);
  } else if (name == "dirac-finplus") {
    one_expr(dirac_examples(opt.window).second);
  } else if (name == "erdos-ulam") {
    std::vector<Rat> f = weights_csv.empty() ? std::vector<Rat>(length, Rat(1))
                                             : parse_rat_list(weights_csv);
    one_expr(erdos_ulam(std::move(f), opt.window));
  } else if (name == "simple-density") {
    std::vector<Rat> g;
    if (weights_csv.empty()) {
      for (Nat n = 1; n <= length; ++n) g.emplace_back(n);
    } else {
      g = parse_rat_list(weights_csv);
    }
    one_expr(simple_density(std::move(g), opt.window));
  } else {
    throw Error(ErrorKind::Usage, "unknown builder '" + name + "'");
  }
  j["outcome"] = "ok";
  emit(opt, std::move(j), human);
  return kExitOk;
}

// ----- obstruction checks -----

template <class SetT>
int obstruction_outcome(const GlobalOptions& opt, Json&& j,
                        const ObstructionResult<SetT>& result) {
  if (const auto* cert = std::get_if<ObstructionCertificate<SetT>>(&result)) {
    j["outcome"] = "obstruction";
    j["certificate"] = certificate_to_json(*cert);
    emit(opt, std::move(j),
         "obstruction certificate: members < " + cert->delta.to_string() +
             ", every " + std::to_string(cert->t) + "-subset union >= " +
             cert->epsilon.to_string() + " (min union " +
             cert->min_union_value.to_string() + ")\n");
    return kExitCheckFailed;
  }
  const auto& fail = std::get<FailureWitness<SetT>>(result);
  j["outcome"] = "no-obstruction";
  Json w;
  w["reason"] = fail.reason == FailureWitness<SetT>::Reason::MemberNotSmall
                    ? "member-not-small"
                    : "subset-union-small";
  w["indices"] = fail.indices;
  w["value"] = qvalue_to_json(fail.value);
  j["witness"] = w;
  std::string human = std::string("no obstruction: ") +
                      std::string(w["reason"].get<std::string>()) + " value " +
                      fail.value.to_string() + "\n";
  emit(opt, std::move(j), human);
  return kExitOk;
}

int cmd_check_obstruction(const GlobalOptions& opt, const std::string& file,
                          const std::string& family_file, const std::string& epsilon,
                          const std::string& delta, std::size_t t) {
  std::string text = read_file(file);
  std::string fam_text = read_file(family_file);
  ExprPtr expr = parse_expr(text, opt.window);
  Json fam_json = Json::parse(fam_text);
  Json j = base_report("check-obstruction", text + "|" + fam_text);
  j["kind"] = "check-obstruction";
  if (expr->sort() == SetSort::Nat) {
    DisjointFamily<NatSet> family(nat_family_from_json(fam_json), FamilyFlavor::Disj);
    return obstruction_outcome<NatSet>(
        opt, std::move(j),
        obstruction_check<NatSet>(expr, family, rational_flag(epsilon),
                                  rational_flag(delta), t));
  }
  DisjointFamily<GridSet> family(grid_family_from_json(fam_json), FamilyFlavor::Disj);
  return obstruction_outcome<GridSet>(
      opt, std::move(j),
      obstruction_check<GridSet>(expr, family, rational_flag(epsilon),
                                 rational_flag(delta), t));
}

int cmd_search_obstruction(const GlobalOptions& opt, const std::string& file,
                           const std::string& epsilon, const std::string& delta,
                           std::size_t m, std::size_t t) {
  std::string text = read_file(file);
  ExprPtr expr = parse_expr(text, opt.window);
  Json j = base_report("search-obstruction", text);
  j["kind"] = "search-obstruction";
  auto finish = [&](auto&& found) -> int {
    if (found) {
      j["outcome"] = "obstruction";
      j["certificate"] = certificate_to_json(*found);
      emit(opt, std::move(j),
           "obstruction found (min union " + found->min_union_value.to_string() + ")\n");
      return kExitCheckFailed;
    }
    j["outcome"] = "none";
    emit(opt, std::move(j), "no obstruction within budget\n");
    return kExitOk;
  };
  if (expr->sort() == SetSort::Nat)
    return finish(search_obstruction<NatSet>(expr, rational_flag(epsilon),
                                             rational_flag(delta), m, t, opt.budget));
  return finish(search_obstruction<GridSet>(expr, rational_flag(epsilon),
                                            rational_flag(delta), m, t, opt.budget));
}

int cmd_check_sdl(const GlobalOptions& opt, const std::string& file,
                  const std::string& family_file, const std::string& c,
                  const std::string& epsilon, std::size_t budget) {
  std::string text = read_file(file);
  std::string fam_text = read_file(family_file);
  ExprPtr expr = parse_expr(text, opt.window);
  DisjointFamily<NatSet> family(nat_family_from_json(Json::parse(fam_text)),
                                FamilyFlavor::Disj);
  SdlResult res = sdl_check(expr, parse_rational(c), rational_flag(epsilon), family,
                            budget == 0 ? family.size() : budget);
  Json j = base_report("check-sdl", text + "|" + fam_text);
  j["kind"] = "check-sdl";
  if (res.status == SdlStatus::PreconditionViolation) {
    j["outcome"] = "precondition-violation";
    j["member"] = res.offending_member;
    j["value"] = qvalue_to_json(res.offending_value);
    emit(opt, std::move(j),
         "precondition violation: member " + std::to_string(res.offending_member) +
             " has value " + res.offending_value.to_string() + " >= c*epsilon\n");
    return kExitUsage;
  }
  j["outcome"] = res.status == SdlStatus::Pass ? "pass" : "fail";
  j["selected"] = res.selected;
  j["unionValue"] = qvalue_to_json(res.union_value);
  emit(opt, std::move(j),
       std::string(res.status == SdlStatus::Pass ? "pass" : "fail") + ": selected " +
           std::to_string(res.selected.size()) + " members, union " +
           res.union_value.to_string() + "\n");
  return res.status == SdlStatus::Pass ? kExitOk : kExitCheckFailed;
}

int cmd_check_ksf(const GlobalOptions& opt, const std::string& file,
                  const std::string& family_file, const std::string& cuts_csv,
                  const std::string& epsilon, std::size_t maxlen, bool even) {
  std::string text = read_file(file);
  std::string fam_text = read_file(family_file);
  ExprPtr expr = parse_expr(text, opt.window);
  DisjointFamily<NatSet> family(nat_family_from_json(Json::parse(fam_text)),
                                FamilyFlavor::Incr);
  std::vector<Nat> cuts = parse_nat_list(cuts_csv);
  auto violations =
      ksf_condition_check(expr, cuts, family, rational_flag(epsilon), maxlen, even);
  Json j = base_report("check-ksf", text + "|" + fam_text + "|" + cuts_csv);
  j["kind"] = "check-ksf";
  j["outcome"] = violations.empty() ? "ok" : "violations";
  Json arr = Json::array();
  std::string human;
  for (const auto& v : violations) {
    Json item;
    item["selection"] = v.selection;
    item["value"] = qvalue_to_json(v.value);
    arr.push_back(item);
    human += "selection";
    for (std::size_t i : v.selection) human += " " + std::to_string(i);
    human += " -> " + v.value.to_string() + "\n";
  }
  j["violations"] = arr;
  if (violations.empty()) human = "no violating selections up to length " +
                                  std::to_string(maxlen) + "\n";
  emit(opt, std::move(j), human);
  return violations.empty() ? kExitOk : kExitCheckFailed;
}

int cmd_refine_dstrong(const GlobalOptions& opt, const std::string& file,
                       const std::string& schedule_file, std::size_t levels) {
  std::string text = read_file(file);
  ExprPtr phi = parse_expr(text, opt.window);
  std::vector<RefineStep> schedule;
  bool defaulted = false;
  if (!schedule_file.empty()) {
    Json sj = Json::parse(read_file(schedule_file));
    for (const auto& item : sj) {
      RefineStep step;
      step.epsilon = parse_rational(item.at("epsilon").get<std::string>());
      step.delta = parse_rational(item.at("delta").get<std::string>());
      for (const auto& c : item.at("cuts")) step.cuts.push_back(c.get<Nat>());
      schedule.push_back(std::move(step));
    }
  } else {
    defaulted = true;
    // default cuts: the maxima of the expression's atomic blocks, else 0,1,2,...
    std::vector<Nat> cuts;
    for (const AnySet& b : phi->atomic_blocks())
      if (sort_of(b) == SetSort::Nat && !set_empty(b))
        cuts.push_back(std::get<NatSet>(b).max());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (cuts.size() < 2) {
      cuts.clear();
      for (Nat i = 0; i + 1 < opt.window && i < 64; ++i) cuts.push_back(i);
    }
    for (std::size_t k = 0; k < levels; ++k) {
      RefineStep step;
      step.epsilon = Rat(1, Int(1) << k);
      step.delta = Rat(1, Int(1) << (k + 2));  // min(eps_k, 2^-k-1)/2
      step.cuts = cuts;
      schedule.push_back(std::move(step));
    }
  }
  RefineResult res = dstrong_refine(phi, schedule);
  Json j = base_report("refine-dstrong", text + "|" + schedule_file);
  j["kind"] = "refine-dstrong";
  j["nu"] = res.nu->to_dsl();
  j["psi"] = res.psi->to_dsl();
  j["cuts"] = res.cuts;
  j["defaultSchedule"] = defaulted;
  j["outcome"] = "ok";
  std::string human;
  if (defaulted)
    human += "note: default schedule delta_k = min(epsilon_k, 2^-(k+1))/2 "
             "(toolkit convention)\n";
  human += "cuts:";
  for (Nat c : res.cuts) human += " " + std::to_string(c);
  human += "\n" + res.nu->to_dsl() + "\n";
  emit(opt, std::move(j), human);
  return kExitOk;
}

int cmd_blockize(const GlobalOptions& opt, const std::string& file,
                 const std::string& cuts_csv) {
  std::string text = read_file(file);
  ExprPtr nu = parse_expr(text, opt.window);
  std::vector<ExprPtr> blocks = blockize(nu, parse_nat_list(cuts_csv));
  Json j = base_report("blockize", text + "|" + cuts_csv);
  j["kind"] = "blockize";
  Json arr = Json::array();
  std::string human;
  for (const ExprPtr& b : blocks) {
    arr.push_back(b->to_dsl());
    human += b->to_dsl() + "\n";
  }
  j["blocks"] = arr;
  j["outcome"] = "ok";
  emit(opt, std::move(j), human);
  return kExitOk;
}

int cmd_normalize_supports(const GlobalOptions& opt, const std::string& file) {
  std::string text = read_file(file);
  std::vector<ExprPtr> mus = parse_exprs(text, opt.window);
  NormalizedSupports norm = normalize_supports(mus);
  Json j = base_report("normalize-supports", text);
  j["kind"] = "normalize-supports";
  Json intervals = Json::array(), nus = Json::array(), cover = Json::array();
  std::string human;
  for (const NatSet& v : norm.intervals.members()) {
    intervals.push_back(Json::array({v.min(), v.max() + 1}));
    human += "[" + std::to_string(v.min()) + "," + std::to_string(v.max() + 1) + ") ";
  }
  human += "\n";
  for (const ExprPtr& nu : norm.nus) {
    nus.push_back(nu->to_dsl());
    human += nu->to_dsl() + "\n";
  }
  for (std::size_t idx : norm.cover_index) cover.push_back(idx);
  j["intervals"] = intervals;
  j["nus"] = nus;
  j["coverIndex"] = cover;
  j["outcome"] = "ok";
  emit(opt, std::move(j), human);
  return kExitOk;
}

int cmd_pathology(const GlobalOptions& opt, const std::string& file,
                  const std::string& set, const std::string& support_text,
                  std::size_t samples) {
  std::string text = read_file(file);
  ExprPtr expr = parse_expr(text, opt.window);
  Json j = base_report("pathology", text + "|" + set + "|" + support_text);
  j["kind"] = "pathology";
  if (samples > 0) {
    AnySet support = support_text.empty() ? expr->support() : parse_set(support_text);
    PathologyScan scan = pathology_scan(expr, support, samples, opt.tolerance, opt.seed);
    j["worstGap"] = qvalue_to_json(scan.worst_gap);
    j["worstTarget"] = anyset_to_json(scan.worst_target);
    j["samples"] = scan.samples;
    bool bad = scan.worst_gap.to_double() > opt.tolerance;
    j["outcome"] = bad ? "pathological" : "ok";
    emit(opt, std::move(j),
         "worst gap " + scan.worst_gap.to_string() + " over " +
             std::to_string(scan.samples) + " targets\n");
    return bad ? kExitCheckFailed : kExitOk;
  }
  AnySet target = parse_set(set);
  AnySet support = support_text.empty() ? target : parse_set(support_text);
  PathologyReport rep = envelope(expr, target, support, opt.tolerance);
  j["report"] = pathology_report_to_json(rep);
  bool bad = rep.gap.to_double() > opt.tolerance;
  j["outcome"] = bad ? "pathological" : "ok";
  emit(opt, std::move(j),
       "value " + rep.target_value.to_string() + ", certified envelope " +
           rational_to_string(rep.certified) + ", gap " + rep.gap.to_string() + "\n");
  return bad ? kExitCheckFailed : kExitOk;
}

int cmd_verify_paper(const GlobalOptions& opt) {
  VerifyOptions vopt;
  vopt.seed = opt.seed;
  vopt.tolerance = opt.tolerance;
  std::vector<CheckLine> checks = run_verification_suite(vopt);
  Json j = base_report("verify-paper", "seed=" + std::to_string(opt.seed));
  j["kind"] = "verify-paper";
  j["seed"] = opt.seed;
  Json arr = Json::array();
  std::string human;
  for (const CheckLine& c : checks) {
    Json item;
    item["name"] = c.name;
    item["pass"] = c.pass;
    item["detail"] = c.detail;
    arr.push_back(item);
    human += std::string(c.pass ? "PASS  " : "FAIL  ") + c.name + "  (" + c.detail + ")\n";
  }
  bool ok = all_pass(checks);
  j["checks"] = arr;
  j["allPass"] = ok;
  j["outcome"] = ok ? "ok" : "mismatch";
  emit(opt, std::move(j), human);
  return ok ? kExitOk : kExitCheckFailed;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Resource:
    case ErrorKind::Window:
    case ErrorKind::Budget:
    case ErrorKind::Overflow:
      return kExitResource;
    default:
      return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"idealkit — exact toolkit for submeasures on finite windows"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions opt;
  app.add_flag("--json", opt.json, "machine-readable JSON output");
  app.add_option("--window", opt.window, "window bound W")
      ->envname("IDEALKIT_WINDOW");
  app.add_option("--seed", opt.seed, "seed for the deterministic generators");
  app.add_option("--budget", opt.budget, "search budget");
  app.add_option("--tolerance", opt.tolerance, "float tolerance for LP reports");
  app.add_option("--threads", opt.threads, "worker threads for the parallel kernels")
      ->envname("IDEALKIT_THREADS");

  std::string file, set_text, support_text, family_file, epsilon = "1", delta = "1/2";
  std::string cuts_csv, schedule_file, name, iota_csv, seeds_csv, of_file, weights_csv;
  std::string c_text = "1/2";
  std::size_t t = 1, m = 2, depth_arg = static_cast<std::size_t>(-1);
  std::size_t maxlen = 4, levels = 6, sdl_budget = 0, samples = 0;
  Nat kmax = 2, mmax = 4, nmax = 9, depth = 4, length = 10;
  bool even = false;

  auto* eval_cmd = app.add_subcommand("eval", "evaluate an expression on a set");
  eval_cmd->add_option("expr", file)->required();
  eval_cmd->add_option("--set", set_text)->required();

  auto* profile_cmd = app.add_subcommand("norm-profile", "truncated tail-norm profile");
  profile_cmd->add_option("expr", file)->required();
  profile_cmd->add_option("--set", set_text)->required();
  profile_cmd->add_option("--depth", depth_arg);

  auto* build_cmd = app.add_subcommand("build", "emit a named construction");
  build_cmd->add_option("name", name)->required();
  build_cmd->add_option("--kmax", kmax);
  build_cmd->add_option("--mmax", mmax);
  build_cmd->add_option("--nmax", nmax);
  build_cmd->add_option("--depth", depth);
  build_cmd->add_option("--iota", iota_csv);
  build_cmd->add_option("--seeds", seeds_csv);
  build_cmd->add_option("--of", of_file);
  build_cmd->add_option("--weights", weights_csv);
  build_cmd->add_option("--length", length);

  auto* check_cmd = app.add_subcommand("check-obstruction", "validate a family against (epsilon, delta, t)");
  check_cmd->add_option("expr", file)->required();
  check_cmd->add_option("--family", family_file)->required();
  check_cmd->add_option("--epsilon", epsilon)->required();
  check_cmd->add_option("--delta", delta)->required();
  check_cmd->add_option("--t", t)->required();

  auto* search_cmd = app.add_subcommand("search-obstruction", "bounded obstruction search");
  search_cmd->add_option("expr", file)->required();
  search_cmd->add_option("--epsilon", epsilon)->required();
  search_cmd->add_option("--delta", delta)->required();
  search_cmd->add_option("--m", m)->required();
  search_cmd->add_option("--t", t)->required();

  auto* sdl_cmd = app.add_subcommand("check-sdl", "greedy strongly-density-like check");
  sdl_cmd->add_option("expr", file)->required();
  sdl_cmd->add_option("--family", family_file)->required();
  sdl_cmd->add_option("--c", c_text)->required();
  sdl_cmd->add_option("--epsilon", epsilon)->required();
  sdl_cmd->add_option("--budget", sdl_budget);

  auto* ksf_cmd = app.add_subcommand("check-ksf", "separation-condition violations");
  ksf_cmd->add_option("expr", file)->required();
  ksf_cmd->add_option("--family", family_file)->required();
  ksf_cmd->add_option("--cuts", cuts_csv)->required();
  ksf_cmd->add_option("--epsilon", epsilon)->required();
  ksf_cmd->add_option("--maxlen", maxlen);
  ksf_cmd->add_flag("--even", even, "check the even-position subsequence");

  auto* refine_cmd = app.add_subcommand("refine-dstrong", "refine with a step submeasure");
  refine_cmd->add_option("expr", file)->required();
  refine_cmd->add_option("--schedule", schedule_file);
  refine_cmd->add_option("--levels", levels);

  auto* blockize_cmd = app.add_subcommand("blockize", "restrict to consecutive blocks");
  blockize_cmd->add_option("expr", file)->required();
  blockize_cmd->add_option("--cuts", cuts_csv)->required();

  auto* normalize_cmd = app.add_subcommand("normalize-supports", "interval renormalization");
  normalize_cmd->add_option("exprs", file)->required();

  auto* pathology_cmd = app.add_subcommand("pathology", "nonpathological envelope via LP");
  pathology_cmd->add_option("expr", file)->required();
  pathology_cmd->add_option("--set", set_text);
  pathology_cmd->add_option("--support", support_text);
  pathology_cmd->add_option("--samples", samples);

  auto* verify_cmd = app.add_subcommand("verify-paper", "run the bundled verification suite");

  CLI11_PARSE(app, argc, argv);

  set_threads(opt.threads);

  auto started = std::chrono::steady_clock::now();
  auto note_wall = [&] {
    std::chrono::duration<double> wall = std::chrono::steady_clock::now() - started;
    std::fprintf(stderr, "# wall %.3fs\n", wall.count());
  };

  int code = kExitUsage;
  try {
    code = [&]() -> int {
      if (eval_cmd->parsed()) return cmd_eval(opt, file, set_text);
      if (profile_cmd->parsed()) return cmd_norm_profile(opt, file, set_text, depth_arg);
      if (build_cmd->parsed())
        return cmd_build(opt, name, kmax, mmax, nmax, depth, iota_csv, seeds_csv,
                         of_file, weights_csv, length);
      if (check_cmd->parsed())
        return cmd_check_obstruction(opt, file, family_file, epsilon, delta, t);
      if (search_cmd->parsed())
        return cmd_search_obstruction(opt, file, epsilon, delta, m, t);
      if (sdl_cmd->parsed())
        return cmd_check_sdl(opt, file, family_file, c_text, epsilon, sdl_budget);
      if (ksf_cmd->parsed())
        return cmd_check_ksf(opt, file, family_file, cuts_csv, epsilon, maxlen, even);
      if (refine_cmd->parsed())
        return cmd_refine_dstrong(opt, file, schedule_file, levels);
      if (blockize_cmd->parsed()) return cmd_blockize(opt, file, cuts_csv);
      if (normalize_cmd->parsed()) return cmd_normalize_supports(opt, file);
      if (pathology_cmd->parsed())
        return cmd_pathology(opt, file, set_text, support_text, samples);
      if (verify_cmd->parsed()) return cmd_verify_paper(opt);
      return kExitUsage;
    }();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitUsage;
  }
  note_wall();
  return code;
}
