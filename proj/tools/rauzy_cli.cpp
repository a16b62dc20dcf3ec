// Command-line front end: words, complexity tables, fractal clouds, orbit
// codings, Rauzy graphs and the verification battery.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rauzy/rauzy.hpp"

namespace {

using namespace rauzy;

struct Options {
  std::optional<std::size_t> kbonacci;
  std::string morphism;
  std::string example;
  std::optional<double> alpha;
  std::string domain;
  std::vector<double> x0;
  std::vector<std::uint64_t> seeds;
  std::size_t length = 0;
  std::size_t nmax = 10;
  std::size_t points = 10000;
  std::size_t order = 1;
  std::size_t steps = 100;
  std::optional<std::size_t> prefix;
  std::string out;
  std::string format;
  std::string stats;
  std::vector<std::string> only;
  double tol = 1e-12;
  std::size_t prefix_cap = std::size_t{1} << 24;
  bool timings = false;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t first_seed(const Options& o) { return o.seeds.empty() ? 1 : o.seeds.front(); }

/// Writes through --out when given, else stdout.
template <class F>
void emit(const Options& o, F&& write, bool binary = false) {
  if (o.out.empty() || o.out == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, binary ? std::ios::binary : std::ios::out);
  if (!f) throw Usage("cannot open " + o.out);
  write(f);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Usage("cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
}

/// {"alphabet": [...], "images": [...] or {"label": "image", ...}}
Substitution load_morphism(const std::string& path) {
  const auto j = read_json(path);
  try {
    auto alphabet = std::make_shared<const Alphabet>(j.at("alphabet").get<std::vector<std::string>>());
    std::vector<std::string> images;
    const auto& im = j.at("images");
    if (im.is_object()) {
      for (const auto& label : alphabet->labels()) images.push_back(im.at(label).get<std::string>());
    } else {
      images = im.get<std::vector<std::string>>();
    }
    return Substitution::parse(alphabet, images);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, path + ": " + e.what());
  }
}

std::optional<Substitution> substitution_source(const Options& o) {
  if (o.kbonacci && !o.morphism.empty()) throw Usage("--kbonacci and --morphism are exclusive");
  if (o.kbonacci) return k_bonacci(*o.kbonacci);
  if (!o.morphism.empty()) return load_morphism(o.morphism);
  return std::nullopt;
}

std::optional<PiecewiseTranslation> translation_source(const Options& o) {
  if (!o.domain.empty()) {
    if (!o.example.empty()) throw Usage("--domain and --example are exclusive");
    return PiecewiseTranslation::from_json(read_json(o.domain));
  }
  if (o.example == "circle") return circle_rotation(o.alpha.value_or(1.0 / golden_ratio));
  if (o.example == "hexagon") return default_hexagon(first_seed(o));
  if (!o.example.empty() && o.example != "paper-4vertex" && o.example != "four-vertex") {
    throw Usage("unknown example '" + o.example + "'");
  }
  return std::nullopt;
}

Vec start_point(const Options& o, const PiecewiseTranslation& t) {
  if (o.x0.empty()) return domain_centroid(t);
  if (o.x0.size() != t.k()) throw Usage("--x0 needs " + std::to_string(t.k()) + " coordinates");
  return o.x0;
}

/// Word source and its declared torus dimension (reference line kn+1).
struct Source {
  LazyWord word;
  std::optional<std::size_t> k;
  StabilizationPolicy policy;
};

Source word_source(const Options& o) {
  StabilizationPolicy policy;
  if (auto s = substitution_source(o)) {
    if (!o.example.empty() || !o.domain.empty()) throw Usage("give one word source");
    std::optional<std::size_t> k;
    if (o.kbonacci) k = *o.kbonacci - 1;
    policy.cap = o.prefix_cap;
    return {fixed_point(*s, Symbol{0}), k, policy};
  }
  if (auto t = translation_source(o)) {
    if (t->k() >= 2) policy = StabilizationPolicy::torus_coding();
    policy.cap = o.prefix_cap;
    return {coding(*t, start_point(o, *t)), t->k(), policy};
  }
  throw Usage("need a word source: --kbonacci, --morphism, --example or --domain");
}

std::string render(const FiniteWord& w) {
  if (w.alphabet()->compact()) return w.to_string();
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w.alphabet()->label(w[i]);
  }
  return out;
}

int cmd_fixed_point(const Options& o) {
  const auto s = substitution_source(o);
  if (!s) throw Usage("need --kbonacci or --morphism");
  const auto w = fixed_point(*s, Symbol{0}).prefix(o.length);
  emit(o, [&](std::ostream& os) { os << render(w) << '\n'; });
  return 0;
}

int cmd_complexity(const Options& o) {
  const auto src = word_source(o);
  const auto table = complexity(src.word, o.nmax, src.policy);
  const auto fmt = o.format.empty() ? std::string("csv") : o.format;
  if (fmt == "csv") {
    emit(o, [&](std::ostream& os) {
      os << "n,p_n,prefix_len,stabilized";
      if (src.k) os << ",kn_plus_1";
      os << '\n';
      for (const auto& e : table.entries()) {
        os << e.n << ',' << e.p << ',' << e.prefix_length << ',' << (e.stabilized ? "true" : "false");
        if (src.k) os << ',' << (*src.k * e.n + 1);
        os << '\n';
      }
    });
  } else if (fmt == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : table.entries()) {
      nlohmann::json r{{"n", e.n}, {"p", e.p}, {"prefix_len", e.prefix_length}, {"stabilized", e.stabilized}};
      if (src.k) r["kn_plus_1"] = *src.k * e.n + 1;
      rows.push_back(std::move(r));
    }
    nlohmann::json j{{"rows", rows}, {"seed", first_seed(o)}};
    if (src.k) j["k"] = *src.k;
    emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  } else {
    throw Usage("complexity supports --format csv|json");
  }
  return 0;
}

int cmd_fractal(const Options& o) {
  const auto s = substitution_source(o);
  if (!s) throw Usage("need --kbonacci or --morphism");
  const auto cloud = fractal_cloud(*s, o.points, o.tol);
  const auto fmt = o.format.empty() ? std::string("csv") : o.format;
  if (fmt == "csv") {
    emit(o, [&](std::ostream& os) { cloud.write_csv(os); });
  } else if (fmt == "bin") {
    emit(o, [&](std::ostream& os) { cloud.write_binary(os); }, true);
  } else if (fmt == "json") {
    nlohmann::json j{{"points", cloud.size()},
                     {"dimension", cloud.dimension()},
                     {"radius", cloud.radius},
                     {"eigenvalue", cloud.perron.eigenvalue}};
    emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  } else {
    throw Usage("fractal supports --format csv|bin|json");
  }
  return 0;
}

int cmd_code_orbit(const Options& o) {
  const auto t = translation_source(o);
  if (!t) throw Usage("need --example circle|hexagon or --domain");
  const auto x0 = start_point(o, *t);
  const auto orb = orbit(*t, x0, o.steps);
  const auto fmt = o.format.empty() ? std::string("csv") : o.format;
  if (fmt == "csv") {
    emit(o, [&](std::ostream& os) { orb.write_csv(os); });
  } else if (fmt == "json") {
    std::string letters;
    for (auto c : orb.cells) letters += std::to_string(c + 1) + (t->m() > 9 ? " " : "");
    nlohmann::json j{{"translation", t->to_json()}, {"x0", x0}, {"coding", letters},
                     {"boundary_hit", orb.boundary_hit}, {"seed", first_seed(o)}};
    emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  } else {
    throw Usage("code-orbit supports --format csv|json");
  }
  return 0;
}

int cmd_graph(const Options& o) {
  std::optional<RauzyGraph> g;
  if (o.example == "paper-4vertex" || o.example == "four-vertex") {
    g = worked_example_graph();
  } else {
    const auto src = word_source(o);
    std::size_t length = 0;
    if (o.prefix) {
      length = *o.prefix;
    } else {
      PrefixBuffer buffer(src.word);
      const auto radix = src.word.alphabet()->size();
      length = std::max({complexity_at(buffer, radix, o.order, src.policy).prefix_length,
                         complexity_at(buffer, radix, o.order + 1, src.policy).prefix_length, o.order + 1});
    }
    g = build_rauzy_graph(src.word, o.order, length);
  }
  const auto stats = graph_stats(*g);
  if (!o.stats.empty()) {
    std::ofstream f(o.stats);
    if (!f) throw Usage("cannot open " + o.stats);
    GraphStats::write_csv_header(f);
    stats.write_csv_row(f);
  }
  const auto fmt = o.format.empty() ? std::string("dot") : o.format;
  if (fmt == "dot") {
    emit(o, [&](std::ostream& os) { g->write_dot(os, true); });
  } else if (fmt == "csv") {
    emit(o, [&](std::ostream& os) {
      GraphStats::write_csv_header(os);
      stats.write_csv_row(os);
    });
  } else if (fmt == "json") {
    const auto basis = cycle_space(*g);
    nlohmann::json j{{"order", stats.order},         {"V", stats.vertices},
                     {"E", stats.edges},             {"components", stats.components},
                     {"dimZ", stats.dim_z},          {"chi", stats.chi},
                     {"provisional", g->provisional()}, {"prefix_len", g->prefix_length()},
                     {"cycles", basis.cycles}};
    emit(o, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  } else {
    throw Usage("graph supports --format dot|csv|json");
  }
  if (g->provisional()) std::cerr << "warning: factor sets not stabilized, graph is provisional\n";
  return 0;
}

int cmd_verify(const Options& o) {
  VerifyOptions v;
  if (!o.seeds.empty()) v.seeds = o.seeds;
  v.only = {o.only.begin(), o.only.end()};
  v.prefix_cap = o.prefix_cap;
  v.tol = o.tol;
  const auto report = Verifier(v).run();
  const auto fmt = o.format.empty() ? std::string("text") : o.format;
  if (fmt == "json") {
    emit(o, [&](std::ostream& os) { os << report.to_json(o.timings).dump(2) << '\n'; });
  } else if (fmt == "text") {
    std::cout << report.summary(o.timings);
    if (!o.out.empty()) {
      std::ofstream f(o.out);
      if (!f) throw Usage("cannot open " + o.out);
      f << report.to_json(o.timings).dump(2) << '\n';
    }
  } else {
    throw Usage("verify supports --format text|json");
  }
  return report.passed() ? 0 : 1;
}

void common_flags(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seeds, "seed (repeatable)")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app->add_option("--out", o.out, "output path (default stdout)");
  app->add_option("--format", o.format, "csv|json|dot|bin|text");
  app->add_option("--tol", o.tol, "numerical tolerance")->check(CLI::PositiveNumber);
  app->add_option("--prefix-cap", o.prefix_cap, "hard cap on prefix length")->check(CLI::PositiveNumber);
}

void word_flags(CLI::App* app, Options& o) {
  app->add_option("--kbonacci", o.kbonacci, "k-bonacci substitution")->check(CLI::Range(1, 255));
  app->add_option("--morphism", o.morphism, "substitution JSON file");
}

void translation_flags(CLI::App* app, Options& o) {
  app->add_option("--example", o.example, "circle|hexagon|four-vertex");
  app->add_option("--alpha", o.alpha, "rotation number of the circle example");
  app->add_option("--domain", o.domain, "piecewise translation JSON file");
  app->add_option("--x0", o.x0, "start point, comma separated")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Substitutive words, piecewise translations and Rauzy graphs"};
  app.require_subcommand(1);
  Options o;

  auto* fp = app.add_subcommand("fixed-point", "prefix of the fixed point starting with the first letter");
  word_flags(fp, o);
  fp->add_option("--length", o.length, "number of letters")->required();
  common_flags(fp, o);

  auto* cx = app.add_subcommand("complexity", "complexity table p(n)");
  word_flags(cx, o);
  translation_flags(cx, o);
  cx->add_option("--nmax", o.nmax, "largest n")->check(CLI::PositiveNumber);
  common_flags(cx, o);

  auto* fr = app.add_subcommand("fractal", "labeled Rauzy fractal point cloud");
  word_flags(fr, o);
  fr->add_option("--points", o.points, "number of projected vertices")->check(CLI::PositiveNumber);
  common_flags(fr, o);

  auto* co = app.add_subcommand("code-orbit", "orbit and coding of a piecewise translation");
  translation_flags(co, o);
  co->add_option("--steps", o.steps, "number of steps");
  common_flags(co, o);

  auto* gr = app.add_subcommand("graph", "Rauzy graph of order n");
  word_flags(gr, o);
  translation_flags(gr, o);
  gr->add_option("--order", o.order, "factor length n")->check(CLI::PositiveNumber);
  gr->add_option("--length", o.prefix, "prefix length (default: stabilized)");
  gr->add_option("--stats", o.stats, "write the stats CSV row here");
  common_flags(gr, o);

  auto* ve = app.add_subcommand("verify", "run the verification battery");
  ve->add_option("--only", o.only, "run only this check (repeatable)")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ve->add_flag("--timings", o.timings, "include runtimes in the report");
  common_flags(ve, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (fp->parsed()) return cmd_fixed_point(o);
    if (cx->parsed()) return cmd_complexity(o);
    if (fr->parsed()) return cmd_fractal(o);
    if (co->parsed()) return cmd_code_orbit(o);
    if (gr->parsed()) return cmd_graph(o);
    if (ve->parsed()) return cmd_verify(o);
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const rauzy::error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  }
  return 2;
}
