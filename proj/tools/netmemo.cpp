// netmemo: memory-assisted compression and network-wide gain experiments.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netmemo/ctw.hpp"
#include "netmemo/flowsim.hpp"
#include "netmemo/gainbench.hpp"
#include "netmemo/lzdict.hpp"
#include "netmemo/parallel.hpp"
#include "netmemo/rplg.hpp"
#include "netmemo/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace netmemo;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kSync = 4 };

/// I/O failures are data errors.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::ofstream open_text(const std::string& path) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad ") + what + " list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

/// Sizes with optional k/M suffixes (powers of 1024).
std::vector<std::size_t> parse_sizes(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t mult = 1;
    const char last = item.back();
    if (last == 'k' || last == 'K') mult = 1024;
    if (last == 'm' || last == 'M') mult = 1024 * 1024;
    if (mult != 1) item.pop_back();
    std::istringstream is(item);
    std::size_t v = 0;
    if (!(is >> v) || !is.eof()) throw UsageError(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v * mult);
  }
  if (out.empty()) throw UsageError(std::string(what) + " list is empty");
  return out;
}

std::string header_comment(const json& config) {
  return "# netmemo " + version_string() + "\n# config " + config.dump() + "\n";
}

Algorithm parse_algo(const std::string& s) {
  if (s == "ctw") return Algorithm::ctw;
  if (s == "lz") return Algorithm::lz;
  throw UsageError("unknown algorithm '" + s + "' (expected ctw or lz)");
}

struct Common {
  unsigned threads = 0;
  [[nodiscard]] unsigned resolved() const { return resolve_threads(threads == 0 ? std::nullopt : std::optional<unsigned>(threads)); }
};

// compress / decompress

struct CodecArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string memory;
  std::string algo = "ctw";
  int depth = kDefaultCtwDepth;
  std::size_t window = kDefaultWindow;
  bool frozen = false;
};

int cmd_compress(const CodecArgs& a) {
  if (a.inputs.size() > 1 && !a.output.empty()) throw UsageError("-o requires a single input");
  const Algorithm algo = parse_algo(a.algo);
  if (algo == Algorithm::lz) check_window(a.window);
  if (a.depth < 0 || a.depth > ContextTree::kMaxDepth) throw UsageError("depth must lie in [0, 32]");
  const Bytes memory = a.memory.empty() ? Bytes{} : read_file(a.memory);
  std::optional<CtwCodec> ctw;
  if (algo == Algorithm::ctw) ctw.emplace(memory, CtwOptions{a.depth, !a.frozen});
  for (const std::string& in : a.inputs) {
    const Bytes data = read_file(in);
    const CodedStream s = algo == Algorithm::ctw ? ctw->encode(data) : lz_encode(data, memory, a.window);
    const Bytes out = s.serialize();
    const std::string path = a.output.empty() ? in + ".nmc" : a.output;
    write_file(path, out);
    const double ratio = data.empty() ? 0.0 : static_cast<double>(out.size()) / static_cast<double>(data.size());
    std::printf("%s -> %s: original=%zu coded=%zu ratio=%.4f (%s)\n", in.c_str(), path.c_str(), data.size(), out.size(), ratio,
                algorithm_name(algo));
  }
  return kOk;
}

int cmd_decompress(const CodecArgs& a, bool depth_given, bool window_given) {
  if (a.inputs.size() > 1 && !a.output.empty()) throw UsageError("-o requires a single input");
  const Bytes memory = a.memory.empty() ? Bytes{} : read_file(a.memory);
  for (const std::string& in : a.inputs) {
    const CodedStream s = CodedStream::parse(read_file(in));
    Bytes data;
    if (s.algorithm == Algorithm::ctw) {
      check_fingerprint(s, memory);
      const int depth = depth_given ? a.depth : s.parameter;
      data = CtwCodec(memory, {depth, !a.frozen}).decode(s);
    } else {
      data = lz_decode(s, memory, window_given ? std::optional<std::size_t>(a.window) : std::nullopt);
    }
    std::string path = a.output;
    if (path.empty()) path = in.size() > 4 && in.ends_with(".nmc") ? in.substr(0, in.size() - 4) : in + ".out";
    write_file(path, data);
    std::printf("%s -> %s: coded=%zu original=%zu (%s)\n", in.c_str(), path.c_str(), s.size(), data.size(),
                algorithm_name(s.algorithm));
  }
  return kOk;
}

// bench-gain

struct BenchArgs {
  std::string algo = "both";
  std::string source = "markov";
  std::string corpus;
  int order = 12;
  std::uint64_t table_seed = 12345;
  double p01 = 0.1;
  double p11 = 0.9;
  std::string n_grid = "100,1k,10k,100k";
  std::string m_grid = "0,64k,1M,4M";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  int depth = kDefaultCtwDepth;
  std::size_t window = kDefaultWindow;
  std::string out;
};

int cmd_bench_gain(const BenchArgs& a, const Common& c) {
  std::vector<Algorithm> algos;
  if (a.algo == "both") algos = {Algorithm::ctw, Algorithm::lz};
  else algos = {parse_algo(a.algo)};
  const auto n_grid = parse_sizes(a.n_grid, "n-grid");
  const auto m_grid = parse_sizes(a.m_grid, "m-grid");
  if (a.trials < 1) throw UsageError("trials must be >= 1");
  check_window(a.window);

  json config = {{"command", "bench-gain"}, {"algo", a.algo}, {"source", a.source}};
  GainSource source;
  if (a.source == "markov") {
    source = MarkovSource::random_table(a.order, a.table_seed, a.seed);
    config["order"] = a.order;
    config["table_seed"] = a.table_seed;
  } else if (a.source == "order1") {
    source = MarkovSource::binary_order1(a.p01, a.p11, a.seed);
    config["p01"] = a.p01;
    config["p11"] = a.p11;
  } else if (a.source == "corpus") {
    if (a.corpus.empty()) throw UsageError("--source corpus needs --corpus FILE");
    source = Corpus{read_file(a.corpus)};
    config["corpus"] = a.corpus;
  } else {
    throw UsageError("unknown source '" + a.source + "' (expected markov, order1 or corpus)");
  }
  config["n_grid"] = n_grid;
  config["m_grid"] = m_grid;
  config["trials"] = a.trials;
  config["seed"] = a.seed;
  config["depth"] = a.depth;
  config["window"] = a.window;

  std::ostringstream csv;
  csv << header_comment(config);
  write_gain_csv_header(csv);
  const CodecParams params{a.depth, a.window};
  for (Algorithm algo : algos)
    for (const GainReport& r : gain_curve(source, algo, n_grid, m_grid, a.trials, params, c.resolved())) write_gain_csv_row(csv, r);
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    open_text(a.out) << csv.str();
    std::fprintf(stderr, "wrote %s\n", a.out.c_str());
  }
  return kOk;
}

// graph experiments

struct GraphArgs {
  std::size_t N = 2000;
  std::string beta = "2.7";
  std::string wbar = "auto";
  std::string delta = "auto";
  std::uint64_t seed = 1;
  std::size_t seeds = 5;
  std::string graph_file;
  std::string weights_file;
};

struct GraphInstance {
  std::uint64_t seed = 0;
  double beta = 0;
  double w_bar = 0;
  double delta = 0;
  Graph full;
  std::vector<NodeId> giant;
  Graph giant_graph;
  std::optional<ExpectedDegreeSequence> sequence;
  std::optional<RplgGraph> rplg;
};

double resolve_param(const std::string& text, double automatic, const char* what) {
  if (text == "auto") return automatic;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("bad --") + what + " value '" + text + "'");
}

ExpectedDegreeSequence make_sequence(const GraphArgs& a, double beta) {
  const AclParameters acl = acl_parameters(a.N, beta);
  return build_weights(a.N, beta, resolve_param(a.wbar, acl.w_bar, "wbar"), resolve_param(a.delta, acl.delta, "delta"));
}

GraphInstance make_instance(const GraphArgs& a, double beta, std::uint64_t seed) {
  GraphInstance g;
  if (!a.graph_file.empty()) {
    std::ifstream in(a.graph_file);
    if (!in) throw IoError("cannot open '" + a.graph_file + "'");
    GraphFile f = read_graph_file(in);
    g.seed = f.seed;
    g.beta = f.beta;
    g.w_bar = f.w_bar;
    g.delta = f.delta;
    g.full = std::move(f.graph);
    if (!a.weights_file.empty()) {
      std::ifstream win(a.weights_file);
      if (!win) throw IoError("cannot open '" + a.weights_file + "'");
      g.sequence = ExpectedDegreeSequence::from_weights(read_weights_file(win, g.full.node_count()));
      g.sequence->beta = g.beta;
      g.sequence->w_bar = g.w_bar;
      g.sequence->delta = g.delta;
    }
  } else {
    const ExpectedDegreeSequence seq = make_sequence(a, beta);
    g.rplg = sample_graph(seq, seed);
    g.seed = seed;
    g.beta = beta;
    g.w_bar = seq.w_bar;
    g.delta = seq.delta;
    g.full = g.rplg->graph;
    g.sequence = seq;
  }
  g.giant = largest_component(g.full);
  g.giant_graph = induced_subgraph(g.full, g.giant);
  return g;
}

/// Core nodes of the instance, as indices into the giant subgraph.
std::vector<NodeId> select_core(const GraphInstance& g, const std::string& mode, double fraction, bool& degenerate, json& info) {
  CoreSpec core;
  if (mode == "topk") {
    core = topk_core(g.full, fraction);
  } else if (mode == "topk-expected") {
    if (!g.sequence) throw UsageError("topk-expected needs expected weights (generate, or pass --weights)");
    core.nodes = top_by_score(g.sequence->weights, fraction);
  } else if (mode == "theorem") {
    if (!g.sequence) throw UsageError("theorem core needs expected weights (generate, or pass --weights)");
    const CoreThreshold t = solve_core_threshold(g.beta, g.w_bar);
    core = theorem_core(*g.sequence, t);
    info["l"] = t.l;
    info["gamma"] = t.gamma;
  } else {
    throw UsageError("unknown core mode '" + mode + "' (expected topk, topk-expected or theorem)");
  }
  degenerate = core.degenerate;
  std::vector<NodeId> idx;
  for (NodeId u : core.nodes) {
    const auto it = std::lower_bound(g.giant.begin(), g.giant.end(), u);
    if (it != g.giant.end() && *it == u) idx.push_back(static_cast<NodeId>(it - g.giant.begin()));
  }
  return idx;
}

int cmd_gen_graph(const GraphArgs& a, const std::string& out, const std::string& weights_out) {
  const double beta = parse_list<double>(a.beta, "beta").front();
  const ExpectedDegreeSequence seq = make_sequence(a, beta);
  const RplgGraph g = sample_graph(seq, a.seed);
  if (out.empty()) {
    write_graph_file(std::cout, g);
  } else {
    auto os = open_text(out);
    write_graph_file(os, g);
  }
  if (!weights_out.empty()) {
    auto ws = open_text(weights_out);
    write_weights_file(ws, seq);
  }
  std::fprintf(stderr, "N=%zu M=%zu giant=%zu beta=%g w_bar=%.6g delta=%.6g c=%.6g i0=%.6g seed=%llu\n", g.node_count(),
               g.graph.edge_count(), g.giant.size(), beta, seq.w_bar, seq.delta, seq.c, seq.i0,
               static_cast<unsigned long long>(a.seed));
  return kOk;
}

json base_config(const char* command, const GraphArgs& a) {
  json config = {{"command", command}, {"N", a.N},           {"beta", a.beta},   {"w_bar", a.wbar},
                 {"delta", a.delta},   {"seed", a.seed},     {"seeds", a.seeds}, {"graph", a.graph_file},
                 {"weights", a.weights_file}};
  return config;
}

std::vector<std::uint64_t> seed_list(const GraphArgs& a) {
  if (!a.graph_file.empty()) return {0};
  if (a.seeds < 1) throw UsageError("seeds must be >= 1");
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < a.seeds; ++i) out.push_back(a.seed + i);
  return out;
}

struct SimArgs {
  std::string g = "3";
  std::string plain_g = "2,3,5,10,100";
  std::string core = "topk";
  std::string fractions = "0.025,0.05,0.1";
  std::string out_dir = "results";
  bool pairs = false;
  bool timing = false;
};

int cmd_simulate(const GraphArgs& a, const SimArgs& s, const Common& c) {
  const auto betas = a.graph_file.empty() ? parse_list<double>(a.beta, "beta") : std::vector<double>{0.0};
  const auto gains = parse_list<std::string>(s.g, "g");
  const auto plain_gains = parse_list<std::string>(s.plain_g, "plain-g");
  const auto fractions = s.core == "theorem" ? std::vector<double>{0.0} : parse_list<double>(s.fractions, "fraction");
  const auto seeds = seed_list(a);
  const unsigned threads = c.resolved();

  json config = base_config("simulate", a);
  config["g"] = s.g;
  config["plain_g"] = s.plain_g;
  config["core_mode"] = s.core;
  config["fractions"] = s.fractions;
  config["pairs"] = s.pairs;

  fs::create_directories(s.out_dir);
  std::ostringstream runs;
  runs << header_comment(config) << "beta,seed,nodes,giant,core_mode,fraction,core_size,g,G,plain_G,single_path_gain,fppc\n";
  std::ofstream pairs;
  if (s.pairs) {
    pairs = open_text((fs::path(s.out_dir) / "pairs.csv").string());
    pairs << header_comment(config) << "beta,seed,core_mode,fraction,g,source,dest,d,deff,memory_id\n";
  }
  json summary;
  summary["version"] = version_string();
  summary["config"] = config;
  summary["results"] = json::array();

  for (double beta : betas) {
    for (double fraction : fractions) {
      for (const std::string& gtext : gains) {
        const Gain gain = Gain::parse(gtext);
        double sum_G = 0, sum_fppc = 0, sum_core = 0;
        std::vector<double> sum_plain(plain_gains.size(), 0.0);
        const auto t0 = std::chrono::steady_clock::now();
        bool any_degenerate = false;
        double used_beta = beta;
        json core_info = json::object();
        for (std::uint64_t seed : seeds) {
          const GraphInstance inst = make_instance(a, beta, seed);
          used_beta = inst.beta;
          bool degenerate = false;
          const auto core = select_core(inst, s.core, fraction, degenerate, core_info);
          if (degenerate && !any_degenerate)
            std::fprintf(stderr, "warning: degenerate core threshold (l <= 1): every node qualifies as core\n");
          any_degenerate |= degenerate;
          const MemoryDeployment dep{core, gain};
          std::vector<std::vector<EffectiveDistance>> per_dest;
          const NetworkGain G = network_gain(inst.giant_graph, dep, threads, s.pairs ? &per_dest : nullptr);
          const DistanceTable dist = hop_distances(inst.giant_graph, threads);
          const NetworkGain P = plain_routing_gain(dist, dep, threads);
          const double F = fppc(dist, core, threads);
          for (std::size_t k = 0; k < plain_gains.size(); ++k) {
            const double v = plain_routing_gain(dist, {core, Gain::parse(plain_gains[k])}, threads).G();
            sum_plain[k] += v;
          }
          sum_G += G.G();
          sum_fppc += F;
          sum_core += static_cast<double>(core.size());
          char line[512];
          std::snprintf(line, sizeof line, "%.6g,%llu,%zu,%zu,%s,%.6g,%zu,%s,%.10g,%.10g,%.10g,%.10g\n", inst.beta,
                        static_cast<unsigned long long>(inst.seed), inst.full.node_count(), inst.giant.size(), s.core.c_str(),
                        fraction, core.size(), gain.str().c_str(), G.G(), P.G(), single_path_gain(gain.value()), F);
          runs << line;
          if (s.pairs) {
            for (NodeId d = 0; d < per_dest.size(); ++d)
              for (NodeId src = 0; src < per_dest[d].size(); ++src) {
                if (src == d || !per_dest[d][src].reachable()) continue;
                const auto& e = per_dest[d][src];
                pairs << inst.beta << ',' << inst.seed << ',' << s.core << ',' << fraction << ',' << gain.str() << ','
                      << inst.giant[src] << ',' << inst.giant[d] << ',' << dist(src, d) << ','
                      << static_cast<double>(e.units) / static_cast<double>(gain.num) << ','
                      << (e.memory ? std::to_string(inst.giant[*e.memory]) : std::string("")) << '\n';
              }
          }
        }
        const double k = static_cast<double>(seeds.size());
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        json r = {{"N", a.N},
                  {"beta", used_beta},
                  {"seed", a.seed},
                  {"seeds", seeds.size()},
                  {"core_mode", s.core},
                  {"fraction", fraction},
                  {"core_size", sum_core / k},
                  {"g", gain.value()},
                  {"G", sum_G / k},
                  {"fppc", sum_fppc / k},
                  {"degenerate_core", any_degenerate}};
        if (!core_info.empty()) r["core_threshold"] = core_info;
        json plain = json::object();
        for (std::size_t i = 0; i < plain_gains.size(); ++i) plain[plain_gains[i]] = sum_plain[i] / k;
        r["plain_routing_G"] = plain;
        r["runtime_ms"] = s.timing ? json(ms) : json(nullptr);
        summary["results"].push_back(r);
        std::fprintf(stderr, "beta=%g fraction=%g g=%s: G=%.4f fppc=%.4f core=%.1f (%lld ms)\n", used_beta, fraction,
                     gain.str().c_str(), sum_G / k, sum_fppc / k, sum_core / k, static_cast<long long>(ms));
      }
    }
  }
  open_text((fs::path(s.out_dir) / "runs.csv").string()) << runs.str();
  open_text((fs::path(s.out_dir) / "summary.json").string()) << summary.dump(2) << '\n';
  std::fprintf(stderr, "wrote %s/summary.json and %s/runs.csv\n", s.out_dir.c_str(), s.out_dir.c_str());
  return kOk;
}

int cmd_fppc(const GraphArgs& a, const std::string& core_mode, const std::string& fractions_text, const std::string& out,
             const Common& c) {
  const auto betas = a.graph_file.empty() ? parse_list<double>(a.beta, "beta") : std::vector<double>{0.0};
  const auto fractions = core_mode == "theorem" ? std::vector<double>{0.0} : parse_list<double>(fractions_text, "fraction");
  const auto seeds = seed_list(a);
  const unsigned threads = c.resolved();
  json config = base_config("fppc", a);
  config["core_mode"] = core_mode;
  config["fractions"] = fractions_text;

  std::ostringstream csv;
  csv << header_comment(config) << "beta,seed,nodes,giant,core_mode,fraction,core_size,fppc\n";
  for (double beta : betas)
    for (std::uint64_t seed : seeds) {
      const GraphInstance inst = make_instance(a, beta, seed);
      const DistanceTable dist = hop_distances(inst.giant_graph, threads);
      for (double fraction : fractions) {
        bool degenerate = false;
        json info;
        const auto core = select_core(inst, core_mode, fraction, degenerate, info);
        if (degenerate) std::fprintf(stderr, "warning: degenerate core threshold (l <= 1)\n");
        char line[256];
        std::snprintf(line, sizeof line, "%.6g,%llu,%zu,%zu,%s,%.6g,%zu,%.10g\n", inst.beta,
                      static_cast<unsigned long long>(inst.seed), inst.full.node_count(), inst.giant.size(), core_mode.c_str(),
                      fraction, core.size(), fppc(dist, core, threads));
        csv << line;
      }
    }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    open_text(out) << csv.str();
    std::fprintf(stderr, "wrote %s\n", out.c_str());
  }
  return kOk;
}

void add_graph_options(CLI::App* cmd, GraphArgs& a, bool allow_file) {
  cmd->add_option("--N", a.N, "Node count")->capture_default_str();
  cmd->add_option("--beta", a.beta, "Power-law exponent(s) in (2,3), comma separated")->capture_default_str();
  cmd->add_option("--wbar", a.wbar, "Average expected degree, or 'auto'")->capture_default_str();
  cmd->add_option("--delta", a.delta, "Maximum expected degree, or 'auto'")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Base seed")->capture_default_str();
  if (allow_file) {
    cmd->add_option("--seeds", a.seeds, "Number of graph instances (seed, seed+1, ...)")->capture_default_str();
    cmd->add_option("--graph", a.graph_file, "Use this edge-list file instead of generating");
    cmd->add_option("--weights", a.weights_file, "Expected-weights sidecar for --graph");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netmemo: memory-assisted universal compression and network-wide memorization gain"};
  app.set_version_flag("--version", std::string("netmemo ") + version_string());
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: $NETMEMO_THREADS, else all cores)");

  CodecArgs codec;
  auto* compress = app.add_subcommand("compress", "Compress files with an optional shared memory");
  compress->add_option("inputs", codec.inputs, "Input files")->required();
  compress->add_option("-o,--output", codec.output, "Output file (default: <input>.nmc)");
  compress->add_option("--memory", codec.memory, "Memory (priming / dictionary) file");
  compress->add_option("--algo", codec.algo, "ctw or lz")->capture_default_str();
  compress->add_option("--depth", codec.depth, "CTW context depth in bits")->capture_default_str();
  compress->add_option("--window", codec.window, "LZ window size in bytes")->capture_default_str();
  compress->add_flag("--frozen", codec.frozen, "CTW: do not update the primed model while coding");

  CodecArgs dcodec;
  auto* decompress = app.add_subcommand("decompress", "Decompress .nmc files");
  decompress->add_option("inputs", dcodec.inputs, "Coded files")->required();
  decompress->add_option("-o,--output", dcodec.output, "Output file (default: input without .nmc)");
  decompress->add_option("--memory", dcodec.memory, "Memory file used at compression time");
  auto* depth_opt = decompress->add_option("--depth", dcodec.depth, "Expected CTW depth (default: from header)");
  auto* window_opt = decompress->add_option("--window", dcodec.window, "Expected LZ window (default: from header)");
  decompress->add_flag("--frozen", dcodec.frozen, "CTW stream was coded with --frozen");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-gain", "Measure g(n,m) over n and m grids");
  bench_cmd->add_option("--algo", bench.algo, "ctw, lz or both")->capture_default_str();
  bench_cmd->add_option("--source", bench.source, "markov (random high-order table), order1 or corpus")->capture_default_str();
  bench_cmd->add_option("--corpus", bench.corpus, "Corpus file for --source corpus");
  bench_cmd->add_option("--order", bench.order, "Markov order for --source markov")->capture_default_str();
  bench_cmd->add_option("--table-seed", bench.table_seed, "Seed of the random transition table")->capture_default_str();
  bench_cmd->add_option("--p01", bench.p01, "order1: P(1 | previous 0)")->capture_default_str();
  bench_cmd->add_option("--p11", bench.p11, "order1: P(1 | previous 1)")->capture_default_str();
  bench_cmd->add_option("--n-grid", bench.n_grid, "Target sizes (k/M suffixes allowed)")->capture_default_str();
  bench_cmd->add_option("--m-grid", bench.m_grid, "Memory sizes (k/M suffixes allowed)")->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Trials per cell")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Source seed")->capture_default_str();
  bench_cmd->add_option("--depth", bench.depth, "CTW depth")->capture_default_str();
  bench_cmd->add_option("--window", bench.window, "LZ window")->capture_default_str();
  bench_cmd->add_option("-o,--out", bench.out, "CSV output (default: stdout)");

  GraphArgs gen;
  std::string gen_out;
  std::string gen_weights;
  auto* gen_cmd = app.add_subcommand("gen-graph", "Sample a random power-law graph");
  add_graph_options(gen_cmd, gen, false);
  gen_cmd->add_option("-o,--out", gen_out, "Edge-list output (default: stdout)");
  gen_cmd->add_option("--weights-out", gen_weights, "Write the expected-weights sidecar");

  GraphArgs sim_graph;
  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Network-wide gain G, plain-routing G and FPPC");
  add_graph_options(sim_cmd, sim_graph, true);
  sim_cmd->add_option("--g", sim.g, "Memorization gain(s) for modified routing")->capture_default_str();
  sim_cmd->add_option("--plain-g", sim.plain_g, "Gains for the plain-routing curve")->capture_default_str();
  sim_cmd->add_option("--core", sim.core, "topk, topk-expected or theorem")->capture_default_str();
  sim_cmd->add_option("--fraction", sim.fractions, "Core fraction(s) of N for topk modes")->capture_default_str();
  sim_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
  sim_cmd->add_flag("--pairs", sim.pairs, "Also write pair-level pairs.csv");
  sim_cmd->add_flag("--timing", sim.timing, "Record runtime_ms (otherwise null, keeping outputs reproducible)");

  GraphArgs fppc_graph;
  fppc_graph.N = 5000;
  fppc_graph.beta = "2.2,2.5,2.8";
  std::string fppc_core = "topk";
  std::string fppc_fractions = "0.005,0.01,0.02,0.05";
  std::string fppc_out;
  auto* fppc_cmd = app.add_subcommand("fppc", "Fraction of shortest paths passing through the core");
  add_graph_options(fppc_cmd, fppc_graph, true);
  fppc_cmd->add_option("--core", fppc_core, "topk, topk-expected or theorem")->capture_default_str();
  fppc_cmd->add_option("--fraction", fppc_fractions, "Core fraction(s) of N")->capture_default_str();
  fppc_cmd->add_option("-o,--out", fppc_out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*compress) return cmd_compress(codec);
    if (*decompress) return cmd_decompress(dcodec, depth_opt->count() > 0, window_opt->count() > 0);
    if (*bench_cmd) return cmd_bench_gain(bench, common);
    if (*gen_cmd) return cmd_gen_graph(gen, gen_out, gen_weights);
    if (*sim_cmd) return cmd_simulate(sim_graph, sim, common);
    if (*fppc_cmd) return cmd_fppc(fppc_graph, fppc_core, fppc_fractions, fppc_out, common);
  } catch (const SyncError& e) {
    std::fprintf(stderr, "synchronization error: %s\n", e.what());
    return kSync;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const CorruptStreamError& e) {
    std::fprintf(stderr, "corrupt stream: %s\n", e.what());
    return kData;
  } catch (const InsufficientDataError& e) {
    std::fprintf(stderr, "insufficient data: %s\n", e.what());
    return kData;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
  return kUsage;
}
