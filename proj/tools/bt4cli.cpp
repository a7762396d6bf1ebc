#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include "bt4/geometry.hpp"
#include "bt4/hecke.hpp"
#include "bt4/io.hpp"
#include "bt4/spectral.hpp"
#include "bt4/stabilizer.hpp"
#include "bt4/verify.hpp"

using namespace bt4;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int q = 2;
  int L = -1;  // -1: the subcommand's own default
  double eps = 0.1;
  double c = 0.1;
  std::optional<double> tol;  // each check has its own default
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";

  int radius(int fallback) const { return L < 0 ? fallback : L; }
  double tol_or(double fallback) const { return tol.value_or(fallback); }
  double checked_eps() const {
    if (!(eps > 0 && eps < 0.5)) throw UsageError("--eps must lie in (0, 1/2)");
    return eps;
  }
};

// where z comes from: explicit tuple, or a family tag (explicit params or seeded draw)
struct PointSource {
  std::vector<std::string> z;
  std::string family;
  std::vector<double> params;

  void add(CLI::App* sub) {
    sub->add_option("--z", z, "four complex numbers, e.g. 'qe^{i0.4}' '1+2i'")->expected(4);
    sub->add_option("--family", family, "Trivial, Family2, Family3, Family4 or Tempered");
    sub->add_option("--params", params, "family parameters (angles, sign or k)");
  }
  bool given() const { return !z.empty() || !family.empty(); }

  XTuple resolve(const RunConfig& cfg, std::uint64_t seed) const {
    if (!z.empty()) {
      ZTuple t;
      for (int k = 0; k < 4; ++k) t[k] = parse_complex(z[k], cfg.q);
      return widen(t);
    }
    if (family.empty()) throw UsageError("give --z or --family");
    FamilyTag tag;
    if (!params.empty()) tag = {parse_family(family), params, false};
    else {
      std::mt19937_64 rng(seed);
      tag = random_tag(parse_family(family), rng);
    }
    return sample_family_ext(tag, cfg.q);
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

json vertex_json(const VertexId& v) { return json::array({v.ell, v.m, v.n}); }

VertexId parse_vertex(const std::string& s) {
  int l, m, n;
  char a, b;
  std::istringstream is(s);
  if (!(is >> l >> a >> m >> b >> n) || a != ',' || b != ',') throw UsageError("vertex must look like l,m,n");
  try {
    return {l, m, n};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

json tag_json(const FamilyTag& t) {
  json j = {{"family", family_name(t.family)}};
  const auto& p = t.params;
  switch (t.family) {
    case Family::Trivial: j["k"] = static_cast<int>(p.at(0)); break;
    case Family::Family2: j["theta"] = p.at(0); break;
    case Family::Family3: j["theta1"] = p.at(0), j["sign"] = static_cast<int>(p.at(1)); break;
    case Family::Family4: j["theta1"] = p.at(0), j["theta2"] = p.at(1); break;
    case Family::Tempered: j["theta1"] = p.at(0), j["theta2"] = p.at(1), j["theta3"] = p.at(2); break;
    case Family::NotInSpectrum: break;
  }
  j["degenerate"] = t.degenerate;
  return j;
}

// evaluate f(k) for k < n on all cores, keeping the order
template <class F>
auto parallel_map(int n, F f) -> std::vector<decltype(f(0))> {
  std::vector<decltype(f(0))> out(n);
  const int workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int k = w; k < n; k += workers) out[k] = f(k);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

int emit_reports(std::ostream& os, const std::vector<VerificationReport>& rs) {
  std::vector<const VerificationReport*> sorted;
  for (const auto& r : rs) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->check < b->check; });
  bool failed = false;
  for (const auto* r : sorted) {
    os << r->to_json().dump() << "\n";
    failed = failed || r->status == Status::Fail;
  }
  return failed ? 1 : 0;
}

// ---- subcommands

int cmd_gen_complex(const RunConfig& cfg) {
  const int L = cfg.radius(3);
  Output out(cfg.out);
  auto& os = out.os();
  if (cfg.format == "csv") {
    os << "l,m,n,class,color,weight,i,to_l,to_m,to_n,coeff\n";
    for (const auto& v : enumerate_ball(L))
      for (int i = 1; i <= 3; ++i)
        for (const auto& t : stencil(v, i, cfg.q))
          os << v.ell << "," << v.m << "," << v.n << "," << class_name(classify(v)) << "," << color(v) << ","
             << vertex_weight(v, cfg.q).get_str() << "," << i << "," << t.u.ell << "," << t.u.m << "," << t.u.n
             << "," << t.coeff << "\n";
    return 0;
  }
  json vs = json::array();
  for (const auto& v : enumerate_ball(L)) {
    json adj = json::object();
    for (int i = 1; i <= 3; ++i) {
      json row = json::array();
      for (const auto& t : stencil(v, i, cfg.q)) row.push_back({{"to", vertex_json(t.u)}, {"coeff", t.coeff}});
      adj[std::to_string(i)] = row;
    }
    const mpq_class w = vertex_weight(v, cfg.q);
    vs.push_back({{"vertex", vertex_json(v)},
                  {"class", class_name(classify(v))},
                  {"color", color(v)},
                  {"weight", w.get_str()},
                  {"weight_float", weight_to_double(w)},
                  {"adjacency", adj}});
  }
  os << json{{"q", cfg.q}, {"L", L}, {"vertices", vs}}.dump() << "\n";
  return 0;
}

int cmd_count_stabilizers(const RunConfig& cfg, const std::vector<std::string>& which, bool brute, double budget) {
  std::vector<VertexId> vs;
  for (const auto& s : which) vs.push_back(parse_vertex(s));
  if (vs.empty()) vs = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 1, 0}, {2, 1, 1}, {2, 2, 1}, {3, 2, 1}};
  Output out(cfg.out);
  bool mismatch = false;
  for (const auto& v : vs) {
    const mpz_class formula = stabilizer_order(v, cfg.q);
    json j = {{"vertex", vertex_json(v)}, {"q", cfg.q}, {"formula_order", formula.get_str()},
              {"brute_force_order", nullptr}, {"match", false}};
    if (brute) {
      try {
        const auto b = brute_force_order(v, cfg.q, budget);
        j["brute_force_order"] = b.order.get_str();
        j["match"] = b.order == formula;
        j["enumerated"] = b.enumerated;
        mismatch = mismatch || b.order != formula;
      } catch (const BudgetExceeded&) {
        j["budget_exceeded"] = true;
      }
    }
    out.os() << j.dump() << "\n";
  }
  return mismatch ? 1 : 0;
}

int cmd_classify(const RunConfig& cfg, const std::vector<std::string>& lambda, const PointSource& src) {
  if (lambda.empty() == !src.given()) throw UsageError("give exactly one of --lambda or --z/--family");
  Decision d;
  if (!lambda.empty()) {
    const EigTriple lam{parse_complex(lambda[0], cfg.q), parse_complex(lambda[1], cfg.q),
                        parse_complex(lambda[2], cfg.q)};
    d = spectrum_decision(lam, cfg.q, cfg.tol_or(kDefaultTol));
  } else {
    d = spectrum_decision(src.resolve(cfg, cfg.seed), cfg.q, cfg.tol_or(kDefaultTol));
  }
  json j = tag_json(d.tag);
  j["in_building_spectrum"] = d.in_building_spectrum;
  j["status"] = status_name(d.report.status);
  j["report"] = d.report.to_json();
  Output out(cfg.out);
  out.os() << j.dump() << "\n";
  return d.report.status == Status::Fail ? 1 : 0;
}

int cmd_residual_sweep(const RunConfig& cfg, const PointSource& src, int count) {
  const int L = cfg.radius(25);
  const bool explicit_z = !src.z.empty() || !src.params.empty();
  const int n = explicit_z ? 1 : count;
  if (n < 1) throw UsageError("--count must be positive");
  struct Row {
    std::string family;
    std::uint64_t seed;
    VerificationReport r;
    bool in_spectrum;
  };
  auto rows = parallel_map(n, [&](int k) {
    const std::uint64_t seed = cfg.seed + k;
    const XTuple z = src.resolve(cfg, seed);
    const VerificationReport r = eigen_residual(z, cfg.q, L, cfg.tol_or(1e-9));
    std::string fam = src.family;
    bool member = true;
    if (explicit_z) {
      try {
        fam = family_name(classify(narrow(z), cfg.q).family);
      } catch (const std::domain_error&) {
        fam = family_name(Family::NotInSpectrum);
      }
      member = fam != family_name(Family::NotInSpectrum);
    }
    return Row{fam, seed, r, member};
  });
  Output out(cfg.out);
  auto& os = out.os();
  bool failed = false;
  if (cfg.format == "csv")
    os << "family,seed,q,L,max_residual_i1,max_residual_i2,max_residual_i3,status,flag\n";
  for (const auto& row : rows) {
    failed = failed || row.r.status == Status::Fail;
    if (cfg.format == "csv") {
      const auto& p = row.r.evidence["per_i"];
      os << row.family << "," << row.seed << "," << cfg.q << "," << L << "," << fmt(p[0].get<double>()) << ","
         << fmt(p[1].get<double>()) << "," << fmt(p[2].get<double>()) << "," << status_name(row.r.status) << ","
         << (row.in_spectrum ? "" : "not in spectrum") << "\n";
    } else {
      json j = row.r.to_json();
      j["inputs"]["seed"] = row.seed;
      j["inputs"]["family"] = row.family;
      if (!row.in_spectrum) j["evidence"]["flag"] = "not in spectrum";
      os << j.dump() << "\n";
    }
  }
  return failed ? 1 : 0;
}

int cmd_spectrum_figure(const RunConfig& cfg, int grid) {
  if (grid < 1) throw UsageError("--grid must be positive");
  Output out(cfg.out);
  auto& os = out.os();
  os << "family,re_lambda1,im_lambda1\n";
  auto emit = [&](Family f, int count) {
    for (const auto& t : family_grid(f, count)) {
      const EigTriple lam = eig_from_z(sample_family_ext(t, cfg.q), cfg.q);
      os << family_name(f) << "," << fmt(lam.l1.real()) << "," << fmt(lam.l1.imag()) << "\n";
    }
  };
  emit(Family::Trivial, 4);
  emit(Family::Family2, grid);
  emit(Family::Family3, 2 * grid);
  emit(Family::Family4, grid * grid);
  emit(Family::Tempered, grid * grid * grid);
  return 0;
}

int cmd_weyl_test(const RunConfig& cfg, const PointSource& src) {
  const double eps = cfg.checked_eps();
  const XTuple z = src.resolve(cfg, cfg.seed);
  std::vector<VerificationReport> rs{weyl_identity_check(z, cfg.q, eps, std::min(cfg.radius(20), 60)),
                                     weyl_ratio(z, cfg.q, eps)};
  Output out(cfg.out);
  return emit_reports(out.os(), rs);
}

int cmd_appendix_b(const RunConfig& cfg, const PointSource& src, int N, int perturbations) {
  const XTuple z = src.resolve(cfg, cfg.seed);
  const int L = cfg.radius(20);
  std::vector<VerificationReport> rs;

  const SequenceTriple s = appendixB_sequences(z, cfg.q, N);
  VerificationReport seq;
  seq.check = "appendixB_sequences";
  seq.anchor = "alpha, beta, gamma recurrences against their closed forms";
  seq.inputs = {{"z", to_json(narrow(z))}, {"q", cfg.q}, {"N", N}};
  seq.bound = 1e-8;
  seq.max_residual = s.max_rel_diff;
  seq.evidence["closed_form"] = s.closed_form;
  seq.evidence["alpha_2"] = to_json(s.alpha.at(std::min(2, N)));
  if (!s.closed_form) seq.flag("repeated roots or products: closed form skipped");
  else if (!(s.max_rel_diff <= 1e-8)) seq.fail("relative gap " + fmt(s.max_rel_diff));
  rs.push_back(seq);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  for (int k = 0; k < perturbations; ++k) {
    BallFunction p(2);
    for (std::size_t j = 1; j < p.size(); ++j) p.at(j) = cplx(nd(rng), nd(rng));
    VerificationReport r = appendixB_convolution(z, cfg.q, p, L);
    r.inputs["perturbation"] = k;
    rs.push_back(r);
  }
  Output out(cfg.out);
  return emit_reports(out.os(), rs);
}

int cmd_report(const RunConfig& cfg, int grid) {
  const VerificationReport r = weakly_ramanujan_report(cfg.q, grid, cfg.checked_eps());
  Output out(cfg.out);
  if (cfg.format == "csv") {
    out.os() << "family,modulus1,modulus2,modulus3,modulus4,partition\n";
    for (const auto& row : r.evidence["partition_table"]) {
      out.os() << row["family"].get<std::string>();
      for (const auto& m : row["moduli"]) out.os() << "," << fmt(m.get<double>());
      out.os() << "," << row["partition"].get<std::string>() << "\n";
    }
  } else {
    out.os() << r.to_json().dump() << "\n";
  }
  return r.status == Status::Fail ? 1 : 0;
}

int cmd_export_operator(const RunConfig& cfg, int i) {
  if (i < 1 || i > 3) throw UsageError("--i must be 1, 2 or 3");
  Output out(cfg.out);
  export_operator(out.os(), cfg.radius(10), i, cfg.q);
  return 0;
}

int cmd_export_eigenfunction(const RunConfig& cfg, const PointSource& src, bool reduced) {
  const XTuple z = src.resolve(cfg, cfg.seed);
  const int L = cfg.radius(10);
  const BallFunction f = Eigenfunction(z, cfg.q).on_ball(L, reduced);
  Output out(cfg.out);
  auto& os = out.os();
  const auto vs = enumerate_ball(L);
  if (cfg.format == "csv") {
    os << "l,m,n,class,re,im\n";
    for (std::size_t k = 0; k < vs.size(); ++k)
      os << vs[k].ell << "," << vs[k].m << "," << vs[k].n << "," << class_name(classify(vs[k])) << ","
         << fmt(f.at(k).real()) << "," << fmt(f.at(k).imag()) << "\n";
    return 0;
  }
  json vals = json::array();
  for (std::size_t k = 0; k < vs.size(); ++k)
    vals.push_back({{"vertex", vertex_json(vs[k])}, {"value", to_json(f.at(k))}});
  os << json{{"q", cfg.q}, {"L", L}, {"z", to_json(narrow(z))}, {"reduced", reduced}, {"values", vals}}.dump()
     << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hecke operators and simultaneous spectrum on the PGL4(Fq[t]) quotient of the building"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--q", cfg.q, "residue field size")->check(CLI::Range(2, 10000));
  app.add_option("--radius", cfg.L, "ball radius L")->check(CLI::Range(0, kMaxEll));
  app.add_option("--eps", cfg.eps, "Weyl damping, 0 < eps < 1/2");
  app.add_option("--c", cfg.c, "growth slack in condition (B)")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "64-bit seed");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::function<int()> run;

  auto* gen = app.add_subcommand("gen-complex", "vertices of ball(L) with class, color, weight and adjacency");
  gen->callback([&] { run = [&] { return cmd_gen_complex(cfg); }; });

  std::vector<std::string> which;
  bool brute = true;
  double budget = 1e8;
  auto* cs = app.add_subcommand("count-stabilizers", "stabilizer orders by formula and by enumeration");
  cs->add_option("--vertex", which, "l,m,n (repeatable; default: one vertex per class)");
  cs->add_flag("!--no-brute", brute, "skip the enumeration");
  cs->add_option("--budget", budget, "enumeration budget");
  cs->callback([&] { run = [&] { return cmd_count_stabilizers(cfg, which, brute, budget); }; });

  std::vector<std::string> lambda;
  PointSource pcl;
  auto* cl = app.add_subcommand("classify", "spectrum decision for an eigenvalue triple or a z-tuple");
  cl->add_option("--lambda", lambda, "three complex eigenvalues")->expected(3);
  pcl.add(cl);
  cl->callback([&] { run = [&] { return cmd_classify(cfg, lambda, pcl); }; });

  PointSource prs;
  int count = 20;
  auto* rsw = app.add_subcommand("residual-sweep", "eigenfunction residuals over seeded family draws");
  prs.add(rsw);
  rsw->add_option("--count", count, "number of draws");
  rsw->callback([&] { run = [&] { return cmd_residual_sweep(cfg, prs, count); }; });

  int grid = 64;
  auto* fig = app.add_subcommand("spectrum-figure", "lambda_1 samples over every family (CSV)");
  fig->add_option("--grid", grid, "points per parameter direction");
  fig->callback([&] { run = [&] { return cmd_spectrum_figure(cfg, grid); }; });

  PointSource pw;
  auto* wt = app.add_subcommand("weyl-test", "Weyl sequence defect identities and norm ratio");
  pw.add(wt);
  wt->callback([&] { run = [&] { return cmd_weyl_test(cfg, pw); }; });

  PointSource pab;
  int N = 100, perturbations = 5;
  auto* ab = app.add_subcommand("appendix-b", "alpha/beta/gamma sequences and ray convolution identities");
  pab.add(ab);
  ab->add_option("--N", N, "sequence length")->check(CLI::Range(1, kMaxEll));
  ab->add_option("--perturbations", perturbations, "random perturbations supported on ball(2)");
  ab->callback([&] { run = [&] { return cmd_appendix_b(cfg, pab, N, perturbations); }; });

  int rgrid = 100;
  auto* rep = app.add_subcommand("report", "weak Ramanujan sweep over all families");
  rep->add_option("--grid", rgrid, "points per family")->check(CLI::Range(1, 100000));
  rep->callback([&] { run = [&] { return cmd_report(cfg, rgrid); }; });

  int op_i = 1;
  auto* eo = app.add_subcommand("export-operator", "sparse coordinate export of A_{w,i} on interior(L)");
  eo->add_option("--i", op_i, "color step 1, 2 or 3");
  eo->callback([&] { run = [&] { return cmd_export_operator(cfg, op_i); }; });

  PointSource pef;
  bool reduced = false;
  auto* ee = app.add_subcommand("export-eigenfunction", "eigenfunction values on ball(L)");
  pef.add(ee);
  ee->add_flag("--reduced", reduced, "divide by sqrt(q)^{3l+m-n}");
  ee->callback([&] { run = [&] { return cmd_export_eigenfunction(cfg, pef, reduced); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
