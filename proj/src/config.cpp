#include "gemd/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gemd/links.hpp"
#include "gemd/updates.hpp"

namespace gemd::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw ArgumentError(path + ": " + what);
}

void check_object_keys(const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad_field(path, "must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) bad_field(path + "." + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "must be a number");
  return j.get<double>();
}

std::size_t get_size(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    bad_field(path, "must be a nonnegative integer");
  return j.get<std::size_t>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad_field(path, "must be an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() &&
      !(j.is_number_integer() && j.get<long long>() >= 0))
    bad_field(path, "must be a nonnegative integer");
  return j.get<std::uint64_t>();
}

double get_snr(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    bad_field(path, "must be a number or \"inf\"");
  }
  return get_number(j, path);
}

}  // namespace

RunConfig config_from_json_text(const std::string& text,
                                const std::string& name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(name + ": " + e.what());
  }
  check_object_keys(j, name, {"instance", "update", "budget", "seeds"});
  RunConfig cfg;

  if (j.contains("instance")) {
    const json& ji = j["instance"];
    check_object_keys(ji, "instance", {"n", "kappa", "K", "delta", "snr_db"});
    if (ji.contains("n")) cfg.instance.n = get_size(ji["n"], "instance.n");
    if (ji.contains("kappa"))
      cfg.instance.kappa = get_number(ji["kappa"], "instance.kappa");
    if (ji.contains("K")) cfg.instance.K = get_size(ji["K"], "instance.K");
    if (ji.contains("delta"))
      cfg.instance.delta = get_number(ji["delta"], "instance.delta");
    if (ji.contains("snr_db"))
      cfg.instance.snr_db = get_snr(ji["snr_db"], "instance.snr_db");
  }
  if (j.contains("update")) {
    const json& ju = j["update"];
    check_object_keys(ju, "update", {"algorithm", "link", "eta", "centred"});
    if (ju.contains("algorithm")) {
      if (!ju["algorithm"].is_string())
        bad_field("update.algorithm", "must be a string");
      cfg.update.algorithm = ju["algorithm"].get<std::string>();
    }
    if (ju.contains("link")) {
      if (!ju["link"].is_string()) bad_field("update.link", "must be a string");
      cfg.update.link = ju["link"].get<std::string>();
    }
    if (ju.contains("eta")) cfg.update.eta = get_number(ju["eta"], "update.eta");
    if (ju.contains("centred")) {
      if (!ju["centred"].is_boolean())
        bad_field("update.centred", "must be a boolean");
      cfg.update.centred = ju["centred"].get<bool>();
    }
  }
  if (j.contains("budget")) {
    const json& jb = j["budget"];
    check_object_keys(jb, "budget",
                      {"t_max", "stop_threshold", "metrics_stride"});
    if (jb.contains("t_max"))
      cfg.budget.t_max = get_int(jb["t_max"], "budget.t_max");
    if (jb.contains("stop_threshold"))
      cfg.budget.stop_threshold =
          get_number(jb["stop_threshold"], "budget.stop_threshold");
    if (jb.contains("metrics_stride"))
      cfg.budget.metrics_stride =
          get_int(jb["metrics_stride"], "budget.metrics_stride");
  }
  if (j.contains("seeds")) {
    const json& js = j["seeds"];
    check_object_keys(js, "seeds", {"instance_seed", "noise_seed", "n_runs"});
    if (js.contains("instance_seed"))
      cfg.seeds.instance_seed =
          get_u64(js["instance_seed"], "seeds.instance_seed");
    if (js.contains("noise_seed"))
      cfg.seeds.noise_seed = get_u64(js["noise_seed"], "seeds.noise_seed");
    if (js.contains("n_runs"))
      cfg.seeds.n_runs = get_int(js["n_runs"], "seeds.n_runs");
  }
  return cfg;
}

std::string config_to_json_text(const RunConfig& cfg) {
  json j;
  j["instance"]["n"] = cfg.instance.n;
  j["instance"]["kappa"] = cfg.instance.kappa;
  j["instance"]["K"] = cfg.instance.K;
  j["instance"]["delta"] = cfg.instance.delta;
  if (cfg.instance.snr_db == std::numeric_limits<double>::infinity())
    j["instance"]["snr_db"] = "inf";
  else
    j["instance"]["snr_db"] = cfg.instance.snr_db;
  j["update"]["algorithm"] = cfg.update.algorithm;
  j["update"]["link"] = cfg.update.link;
  j["update"]["eta"] = cfg.update.eta;
  j["update"]["centred"] = cfg.update.centred;
  j["budget"]["t_max"] = cfg.budget.t_max;
  j["budget"]["stop_threshold"] = cfg.budget.stop_threshold;
  j["budget"]["metrics_stride"] = cfg.budget.metrics_stride;
  j["seeds"]["instance_seed"] = cfg.seeds.instance_seed;
  j["seeds"]["noise_seed"] = cfg.seeds.noise_seed;
  j["seeds"]["n_runs"] = cfg.seeds.n_runs;
  return j.dump(2) + "\n";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str(), path);
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write config file: " + path);
  out << config_to_json_text(cfg);
}

void validate_config(const RunConfig& cfg) {
  if (cfg.instance.n < 2) bad_field("instance.n", "must be >= 2");
  if (!(cfg.instance.kappa >= 1.0) || !std::isfinite(cfg.instance.kappa))
    bad_field("instance.kappa", "must be a finite number >= 1");
  if (cfg.instance.K < 1 || cfg.instance.K > cfg.instance.n)
    bad_field("instance.K", "must satisfy 1 <= K <= n");
  if (!(cfg.instance.delta > 0.0) || !std::isfinite(cfg.instance.delta))
    bad_field("instance.delta", "must be a finite number > 0");
  if (std::isnan(cfg.instance.snr_db) ||
      cfg.instance.snr_db == -std::numeric_limits<double>::infinity())
    bad_field("instance.snr_db", "must be a real number or +inf");
  try {
    updates::algorithm_from_key(cfg.update.algorithm);
  } catch (const Error& e) {
    bad_field("update.algorithm", e.what());
  }
  try {
    links::LinkFunction::parse(cfg.update.link);
  } catch (const Error& e) {
    bad_field("update.link", e.what());
  }
  if (!(cfg.update.eta > 0.0) || !std::isfinite(cfg.update.eta))
    bad_field("update.eta", "must be a finite number > 0");
  if (cfg.budget.t_max < 1) bad_field("budget.t_max", "must be >= 1");
  if (!(cfg.budget.stop_threshold >= 0.0) ||
      !std::isfinite(cfg.budget.stop_threshold))
    bad_field("budget.stop_threshold", "must be a finite number >= 0");
  if (cfg.budget.metrics_stride < 1)
    bad_field("budget.metrics_stride", "must be >= 1");
  if (cfg.seeds.n_runs < 1) bad_field("seeds.n_runs", "must be >= 1");
}

}  // namespace gemd::cli
