#include "cdnet/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "cdnet/version.hpp"

namespace cdnet {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(std::string("missing key '") + key + "'");
  }
  return obj.at(key);
}

std::vector<double> number_list(const json& value, const char* key) {
  std::vector<double> out;
  if (value.is_number()) {
    out.push_back(value.get<double>());
  } else if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
      out.push_back(v.get<double>());
    }
  } else {
    throw ConfigError(std::string("'") + key + "' must be a number or a list of numbers");
  }
  if (out.empty()) throw ConfigError(std::string("'") + key + "' is empty");
  return out;
}

double snap(double x) { return std::round(x * 1e12) / 1e12; }

std::vector<double> parse_q(const json& value) {
  if (value.is_object()) {
    const double start = require(value, "start").get<double>();
    const double stop = require(value, "stop").get<double>();
    const double step = require(value, "step").get<double>();
    if (!(step > 0.0) || stop < start) throw ConfigError("q range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(snap(start + static_cast<double>(i) * step));
    return out;
  }
  if (value.is_array() && value.empty()) throw ConfigError("q list is empty");
  return number_list(value, "q");
}

// Integer or "auto" (returned as nullopt).
std::optional<int> int_or_auto(const json& value, const char* key) {
  if (value.is_string() && value.get<std::string>() == "auto") return std::nullopt;
  if (value.is_number_integer()) return value.get<int>();
  throw ConfigError(std::string("'") + key + "' must be an integer or \"auto\"");
}

constexpr const char* kRelation =
    "t_cut <= -T ln((3/(4F_new-1)) ((4F_min-1)/3)^(1/M))";

SweepPoint resolve_point(HardwareParams hw, double f_min, std::optional<int> cutoff,
                         std::optional<int> swap_distance, bool link_pgen,
                         const LatticeSpec& lattice, const json& mc) {
  try {
    validate(hw);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(f_min >= 0.5 && f_min < 1.0)) throw ConfigError("Fmin must be in [1/2, 1)");
  if (link_pgen) {
    if (!(hw.p_gen > 0.0)) throw ConfigError("linked p_gen scaling needs p_gen > 0");
    hw.coherence_time /= hw.p_gen;
    if (cutoff) cutoff = static_cast<int>(std::lround(*cutoff / hw.p_gen));
  }
  SweepPoint point;
  point.hardware = hw;
  point.f_min = f_min;
  try {
    if (!cutoff && !swap_distance) throw ConfigError("tcut and M cannot both be \"auto\"");
    if (!swap_distance) {
      point.cutoff = *cutoff;
      point.max_swap_distance = max_swap_distance(hw.coherence_time, *cutoff, hw.f_new, f_min);
    } else {
      point.max_swap_distance = *swap_distance;
      if (*swap_distance < 1) throw ConfigError("M must be >= 1");
      point.cutoff = cutoff ? *cutoff
                            : max_cutoff(hw.coherence_time, hw.f_new, f_min, *swap_distance);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("parameters violate ") + kRelation + ": " + e.what());
  }
  if (point.cutoff < 1) throw ConfigError("tcut must be >= 1");
  if (!satisfies_cutoff_relation(hw.coherence_time, point.cutoff, hw.f_new, f_min,
                                 point.max_swap_distance)) {
    throw ConfigError(
        std::string("parameters violate ") + kRelation + ": T=" + format_number(hw.coherence_time) +
        " F_new=" + format_number(hw.f_new) + " F_min=" + format_number(f_min) +
        " M=" + std::to_string(point.max_swap_distance) + " allows t_cut <= " +
        format_number(cutoff_bound(hw.coherence_time, hw.f_new, f_min, point.max_swap_distance)) +
        ", got t_cut=" + std::to_string(point.cutoff));
  }
  point.schedule = default_schedule(point.cutoff, lattice.kind, lattice.boundary);
  if (mc.contains("steps") && !mc.at("steps").is_null()) point.schedule.steps = mc.at("steps").get<int>();
  if (mc.contains("window") && !mc.at("window").is_null()) point.schedule.window = mc.at("window").get<int>();
  if (point.schedule.steps < 2) throw ConfigError("mc.steps must be >= 2");
  if (point.schedule.window < 1 || point.schedule.window > point.schedule.steps) {
    throw ConfigError("mc.window must be in [1, steps]");
  }
  return point;
}

NodeSelection parse_tracked(const json& doc) {
  NodeSelection sel;
  if (!doc.contains("track")) return sel;
  const json& t = doc.at("track");
  if (t.is_string()) {
    const auto s = t.get<std::string>();
    if (s == "all") sel.kind = NodeSelection::Kind::All;
    else if (s == "representative") sel.kind = NodeSelection::Kind::Representative;
    else throw ConfigError("track must be \"all\", \"representative\" or a list of node ids");
    return sel;
  }
  if (!t.is_array() || t.empty()) throw ConfigError("track list must be a non-empty array");
  sel.kind = NodeSelection::Kind::List;
  for (const auto& v : t) {
    if (!v.is_number_integer()) throw ConfigError("track list must hold node ids");
    sel.nodes.push_back(v.get<NodeId>());
  }
  return sel;
}

}  // namespace

int ExperimentConfig::max_swap_distance() const {
  int m = 1;
  for (const auto& p : points) m = std::max(m, p.max_swap_distance);
  return m;
}

ExperimentConfig parse_config(const json& doc) {
  try {
    ExperimentConfig cfg;
    cfg.source = doc;
    try {
      cfg.lattice.kind = parse_topology(require(doc, "topology").get<std::string>());
      cfg.lattice.boundary = parse_boundary(require(doc, "boundary").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    cfg.lattice.dims = require(doc, "dims").get<std::vector<int>>();

    const json& hw = require(doc, "hardware");
    const json& policy = require(doc, "policy");
    const json mc = doc.value("mc", json::object());

    const auto p_gen = number_list(hw.value("pgen", json(1.0)), "pgen");
    const auto p_swap = number_list(hw.value("pswap", json(1.0)), "pswap");
    const auto coherence = number_list(require(hw, "T"), "T");
    const auto f_new = number_list(require(hw, "Fnew"), "Fnew");
    const double f_min = policy.value("Fmin", 0.5);
    const auto cutoff = int_or_auto(policy.value("tcut", json("auto")), "tcut");
    const auto swap_distance = int_or_auto(require(policy, "M"), "M");
    cfg.q_values = parse_q(require(policy, "q"));
    for (double q : cfg.q_values) {
      if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("q values must be in [0, 1]");
    }
    cfg.link_pgen_scaling = doc.value("link_pgen_scaling", false);
    cfg.verify_fidelity = doc.value("verify_fidelity", false);

    for (double pg : p_gen) {
      for (double ps : p_swap) {
        for (double t : coherence) {
          for (double fn : f_new) {
            HardwareParams h{pg, ps, t, fn};
            cfg.points.push_back(resolve_point(h, f_min, cutoff, swap_distance,
                                               cfg.link_pgen_scaling, cfg.lattice, mc));
          }
        }
      }
    }

    cfg.realizations = mc.value("N", std::int64_t{1000});
    if (cfg.realizations < 2) throw ConfigError("mc.N must be >= 2");
    cfg.base_seed = mc.value("seed", std::uint64_t{0});
    cfg.q_index_base = mc.value("q_index_base", std::int64_t{0});
    cfg.tracked = parse_tracked(doc);

    try {
      const auto graph = build_lattice(cfg.lattice, cfg.max_swap_distance());
      if (cfg.tracked.kind == NodeSelection::Kind::List) {
        for (NodeId n : cfg.tracked.nodes) {
          if (n < 0 || n >= graph.node_count()) throw ConfigError("tracked node id out of range");
        }
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::int64_t q_index) {
  return mix_seed(base_seed, static_cast<std::uint64_t>(q_index));
}

std::vector<NodeId> tracked_nodes(const NodeSelection& selection, const PhysicalGraph& graph) {
  switch (selection.kind) {
    case NodeSelection::Kind::All: {
      std::vector<NodeId> all(graph.node_count());
      for (NodeId i = 0; i < graph.node_count(); ++i) all[i] = i;
      return all;
    }
    case NodeSelection::Kind::Representative: return {representative_node(graph)};
    case NodeSelection::Kind::List: return selection.nodes;
  }
  return {};
}

SweepOutput run_sweep(const ExperimentConfig& config, Execution execution) {
  const auto graph = build_lattice(config.lattice, config.max_swap_distance());
  const auto nodes = tracked_nodes(config.tracked, graph);
  SweepOutput out;
  for (std::size_t p = 0; p < config.points.size(); ++p) {
    const SweepPoint& point = config.points[p];
    for (std::size_t qi = 0; qi < config.q_values.size(); ++qi) {
      ProtocolConfig protocol;
      protocol.hardware = point.hardware;
      protocol.policy = {point.cutoff, point.max_swap_distance, point.f_min, config.q_values[qi]};
      protocol.verify_fidelity = config.verify_fidelity;
      const auto seed = stream_seed(config.base_seed,
                                    config.q_index_base + static_cast<std::int64_t>(qi));
      const auto result = estimate(graph, protocol, point.schedule, config.realizations, seed,
                                   execution);
      for (NodeId node : nodes) {
        for (Metric m : {Metric::VirtualNeighborhood, Metric::VirtualDegree}) {
          const auto& rec = result.record(node, m);
          SweepResultRow row;
          row.topology = to_string(graph.kind());
          row.boundary = to_string(graph.boundary());
          row.dims = graph.dims_string();
          row.degree = graph.nominal_degree();
          row.q = config.q_values[qi];
          row.p_gen = point.hardware.p_gen;
          row.p_swap = point.hardware.p_swap;
          row.coherence_time = point.hardware.coherence_time;
          row.cutoff = point.cutoff;
          row.f_new = point.hardware.f_new;
          row.f_min = point.f_min;
          row.max_swap_distance = point.max_swap_distance;
          row.realizations = config.realizations;
          row.steps = point.schedule.steps;
          row.window = point.schedule.window;
          row.node = node;
          row.metric = m;
          row.mean = rec.mean;
          row.std_dev = rec.std_dev;
          row.band6 = rec.band6;
          row.steady = rec.verdict.success;
          out.rows.push_back(row);
          for (int t = 0; t < result.series.steps(); ++t) {
            out.series.push_back({p, config.q_values[qi], node, m, t, result.series.mean(m, t, node)});
          }
        }
      }
    }
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "topology", "boundary", "dims", "d",    "q",    "p_gen", "p_swap",
      "T",        "t_cut",    "F_new", "F_min", "M",  "N",     "steps",
      "window",   "node",     "metric", "mean", "std", "band6", "steady"};
  return columns;
}

void write_csv(std::ostream& os, const std::vector<SweepResultRow>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    os << r.topology << ',' << r.boundary << ',' << r.dims << ',' << r.degree << ','
       << format_number(r.q) << ',' << format_number(r.p_gen) << ',' << format_number(r.p_swap)
       << ',' << format_number(r.coherence_time) << ',' << r.cutoff << ','
       << format_number(r.f_new) << ',' << format_number(r.f_min) << ',' << r.max_swap_distance
       << ',' << r.realizations << ',' << r.steps << ',' << r.window << ',' << r.node << ','
       << to_string(r.metric) << ',' << format_number(r.mean) << ','
       << format_number(r.std_dev) << ',' << format_number(r.band6) << ','
       << (r.steady ? "true" : "false") << '\n';
  }
}

void write_timeseries_csv(std::ostream& os, const ExperimentConfig& config,
                          const std::vector<TimeSeriesRow>& rows) {
  os << "q,p_gen,p_swap,T,t_cut,F_new,M,node,metric,t,mean\n";
  for (const auto& r : rows) {
    const auto& p = config.points[r.point];
    os << format_number(r.q) << ',' << format_number(p.hardware.p_gen) << ','
       << format_number(p.hardware.p_swap) << ',' << format_number(p.hardware.coherence_time)
       << ',' << p.cutoff << ',' << format_number(p.hardware.f_new) << ','
       << p.max_swap_distance << ',' << r.node << ',' << to_string(r.metric) << ',' << r.t << ','
       << format_number(r.mean) << '\n';
  }
}

nlohmann::json sweep_metadata(const ExperimentConfig& config) {
  json meta;
  meta["code_version"] = kVersion;
  meta["columns"] = csv_columns();
  meta["config"] = config.source;
  meta["base_seed"] = config.base_seed;
  meta["seed_scheme"] =
      "stream = mix_seed(base_seed, q_index_base + q_index); "
      "realization r uses mix_seed(stream, r); mix_seed(a, b) = splitmix64(splitmix64(a) ^ "
      "(b + 0x632be59bd9b4e019))";
  meta["realizations"] = config.realizations;
  json points = json::array();
  for (const auto& p : config.points) {
    json jp;
    jp["p_gen"] = p.hardware.p_gen;
    jp["p_swap"] = p.hardware.p_swap;
    jp["T"] = p.hardware.coherence_time;
    jp["F_new"] = p.hardware.f_new;
    jp["F_min"] = p.f_min;
    jp["t_cut"] = p.cutoff;
    jp["M"] = p.max_swap_distance;
    jp["steps"] = p.schedule.steps;
    jp["window"] = p.schedule.window;
    points.push_back(jp);
  }
  meta["points"] = points;
  json qs = json::array();
  for (std::size_t i = 0; i < config.q_values.size(); ++i) {
    const auto qi = config.q_index_base + static_cast<std::int64_t>(i);
    qs.push_back({{"q", config.q_values[i]}, {"q_index", qi},
                  {"stream_seed", stream_seed(config.base_seed, qi)}});
  }
  meta["q_grid"] = qs;
  return meta;
}

}  // namespace cdnet
