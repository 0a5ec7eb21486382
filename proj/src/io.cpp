#include "otc/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "otc/error.hpp"

namespace otc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      fail(ErrorCode::ConfigParse, "unknown key '" + it.key() + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    fail(ErrorCode::ConfigParse, "missing key '" + std::string(key) + "' in " + where);
  if (!obj[key].is_number())
    fail(ErrorCode::ConfigParse, "key '" + std::string(key) + "' in " + where +
                                     " must be a number");
  return obj[key].get<double>();
}

std::vector<double> get_vector(const json& obj, const char* key,
                               const std::string& where) {
  if (!obj.contains(key))
    fail(ErrorCode::ConfigParse, "missing key '" + std::string(key) + "' in " + where);
  const json& arr = obj[key];
  if (!arr.is_array() || arr.empty())
    fail(ErrorCode::ConfigParse, "key '" + std::string(key) + "' in " + where +
                                     " must be a non-empty array");
  std::vector<double> out;
  for (const json& v : arr) {
    if (!v.is_number())
      fail(ErrorCode::ConfigParse, "array '" + std::string(key) + "' in " + where +
                                       " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

NonSegmentedParams parse_nonseg(const json& obj) {
  reject_unknown_keys(obj, {"lambda", "gamma_u", "gamma_d", "gamma_ui", "gamma_di", "m"},
                      "params");
  NonSegmentedParams p;
  p.lambda = get_vector(obj, "lambda", "params");
  p.gamma_u = get_number(obj, "gamma_u", "params");
  p.gamma_d = get_number(obj, "gamma_d", "params");
  p.gamma_ui = get_vector(obj, "gamma_ui", "params");
  p.gamma_di = get_vector(obj, "gamma_di", "params");
  p.m = get_vector(obj, "m", "params");
  return p;
}

PartiallySegmentedParams parse_partseg(const json& obj) {
  reject_unknown_keys(
      obj, {"lambda", "gamma_ui", "gamma_di", "gamma_tilde_ui", "gamma_tilde_di", "m"},
      "params");
  PartiallySegmentedParams p;
  p.lambda = get_vector(obj, "lambda", "params");
  p.gamma_ui = get_vector(obj, "gamma_ui", "params");
  p.gamma_di = get_vector(obj, "gamma_di", "params");
  p.gamma_tilde_ui = get_vector(obj, "gamma_tilde_ui", "params");
  p.gamma_tilde_di = get_vector(obj, "gamma_tilde_di", "params");
  p.m = get_vector(obj, "m", "params");
  return p;
}

HeterogeneousParams parse_het(const json& obj) {
  reject_unknown_keys(
      obj, {"lambda", "a", "b", "c0", "c1", "c2", "d0", "d1", "d2", "s"}, "params");
  HeterogeneousParams p;
  p.lambda = obj.contains("lambda") ? get_number(obj, "lambda", "params") : 1.0;
  p.a = get_number(obj, "a", "params");
  p.b = get_number(obj, "b", "params");
  p.c = {get_number(obj, "c0", "params"), get_number(obj, "c1", "params"),
         get_number(obj, "c2", "params")};
  p.d = {get_number(obj, "d0", "params"), get_number(obj, "d1", "params"),
         get_number(obj, "d2", "params")};
  p.s = get_number(obj, "s", "params");
  return p;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, e.what());
  }
  if (!root.is_object()) fail(ErrorCode::ConfigParse, "config root must be an object");
  reject_unknown_keys(
      root, {"model", "params", "initial", "integrate", "steady", "simulate", "verify",
             "out"},
      "config");
  if (!root.contains("model") || !root["model"].is_string())
    fail(ErrorCode::ConfigParse, "config needs a string 'model' key");
  if (!root.contains("params") || !root["params"].is_object())
    fail(ErrorCode::ConfigParse, "config needs an object 'params' key");

  RunConfig config;
  config.model_class = model_class_from_string(root["model"].get<std::string>());
  try {
    switch (config.model_class) {
      case ModelClass::NonSegmented:
        config.nonseg = validate(parse_nonseg(root["params"]));
        break;
      case ModelClass::PartiallySegmented:
        config.partseg = validate(parse_partseg(root["params"]));
        break;
      case ModelClass::Heterogeneous:
        config.het = validate(parse_het(root["params"]));
        break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigParse) throw;
    fail(ErrorCode::ConfigParse, e.what());
  }

  if (root.contains("initial")) config.initial = get_vector(root, "initial", "config");

  if (root.contains("integrate")) {
    const json& block = root["integrate"];
    reject_unknown_keys(block, {"t_end", "step", "sample_every"}, "integrate");
    if (block.contains("t_end")) config.integrate.t_end = get_number(block, "t_end", "integrate");
    if (block.contains("step")) config.integrate.step = get_number(block, "step", "integrate");
    if (block.contains("sample_every"))
      config.integrate.sample_every = get_number(block, "sample_every", "integrate");
  }
  if (root.contains("steady")) {
    const json& block = root["steady"];
    reject_unknown_keys(block, {"tol", "eps", "grid"}, "steady");
    if (block.contains("tol")) config.steady.tol = get_number(block, "tol", "steady");
    if (block.contains("eps")) config.steady.eps = get_number(block, "eps", "steady");
    if (block.contains("grid"))
      config.steady.grid = static_cast<std::size_t>(get_number(block, "grid", "steady"));
  }
  if (root.contains("simulate")) {
    const json& block = root["simulate"];
    reject_unknown_keys(block, {"n", "seed", "t_end", "sample_every", "compare"},
                        "simulate");
    if (block.contains("n"))
      config.simulate.n = static_cast<std::size_t>(get_number(block, "n", "simulate"));
    if (block.contains("seed"))
      config.simulate.seed =
          static_cast<std::uint64_t>(get_number(block, "seed", "simulate"));
    if (block.contains("t_end"))
      config.simulate.t_end = get_number(block, "t_end", "simulate");
    if (block.contains("sample_every"))
      config.simulate.sample_every = get_number(block, "sample_every", "simulate");
    if (block.contains("compare")) {
      if (!block["compare"].is_boolean())
        fail(ErrorCode::ConfigParse, "'compare' must be a boolean");
      config.simulate.compare = block["compare"].get<bool>();
    }
  }
  if (root.contains("verify")) {
    const json& block = root["verify"];
    reject_unknown_keys(block, {"tol", "seed", "draws", "sim_n", "sim_sup_tol"},
                        "verify");
    if (block.contains("tol")) config.verify.tol = get_number(block, "tol", "verify");
    if (block.contains("seed"))
      config.verify.seed = static_cast<std::uint64_t>(get_number(block, "seed", "verify"));
    if (block.contains("draws"))
      config.verify.draws = static_cast<std::size_t>(get_number(block, "draws", "verify"));
    if (block.contains("sim_n"))
      config.verify.sim_n = static_cast<std::size_t>(get_number(block, "sim_n", "verify"));
    if (block.contains("sim_sup_tol"))
      config.verify.sim_sup_tol = get_number(block, "sim_sup_tol", "verify");
  }
  if (root.contains("out")) {
    if (!root["out"].is_string()) fail(ErrorCode::ConfigParse, "'out' must be a string");
    config.out_prefix = root["out"].get<std::string>();
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigParse, "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string serialize_config(const RunConfig& config) {
  json root;
  root["model"] = to_string(config.model_class);
  json params;
  switch (config.model_class) {
    case ModelClass::NonSegmented: {
      const NonSegmentedParams& p = *config.nonseg;
      params["lambda"] = p.lambda;
      params["gamma_u"] = p.gamma_u;
      params["gamma_d"] = p.gamma_d;
      params["gamma_ui"] = p.gamma_ui;
      params["gamma_di"] = p.gamma_di;
      params["m"] = p.m;
      break;
    }
    case ModelClass::PartiallySegmented: {
      const PartiallySegmentedParams& p = *config.partseg;
      params["lambda"] = p.lambda;
      params["gamma_ui"] = p.gamma_ui;
      params["gamma_di"] = p.gamma_di;
      params["gamma_tilde_ui"] = p.gamma_tilde_ui;
      params["gamma_tilde_di"] = p.gamma_tilde_di;
      params["m"] = p.m;
      break;
    }
    case ModelClass::Heterogeneous: {
      const HeterogeneousParams& p = *config.het;
      params["lambda"] = p.lambda;
      params["a"] = p.a;
      params["b"] = p.b;
      params["c0"] = p.c[0];
      params["c1"] = p.c[1];
      params["c2"] = p.c[2];
      params["d0"] = p.d[0];
      params["d1"] = p.d[1];
      params["d2"] = p.d[2];
      params["s"] = p.s;
      break;
    }
  }
  root["params"] = params;
  if (config.initial) root["initial"] = *config.initial;
  root["integrate"] = {{"t_end", config.integrate.t_end},
                       {"step", config.integrate.step},
                       {"sample_every", config.integrate.sample_every}};
  root["steady"] = {{"tol", config.steady.tol},
                    {"eps", config.steady.eps},
                    {"grid", config.steady.grid}};
  root["simulate"] = {{"n", config.simulate.n},
                      {"seed", config.simulate.seed},
                      {"t_end", config.simulate.t_end},
                      {"sample_every", config.simulate.sample_every},
                      {"compare", config.simulate.compare}};
  root["verify"] = {{"tol", config.verify.tol},
                    {"seed", config.verify.seed},
                    {"draws", config.verify.draws},
                    {"sim_n", config.verify.sim_n},
                    {"sim_sup_tol", config.verify.sim_sup_tol}};
  root["out"] = config.out_prefix;
  return root.dump(2) + "\n";
}

void write_table_atomic(const std::filesystem::path& path, const Table& table) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot open " + tmp.string());
    for (std::size_t c = 0; c < table.header.size(); ++c)
      out << (c ? "\t" : "") << table.header[c];
    out << "\n";
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "\t" : "") << row[c];
      out << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open " + path.string());
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace otc
