#include "iacr/config_file.hpp"

#include <fstream>
#include <istream>
#include <regex>
#include <set>
#include <sstream>

#include "iacr/errors.hpp"

namespace iacr {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return kv_.count(key) > 0;
  }

  template <class T, class Parse>
  void get(const std::string& key, T& target, Parse parse) {
    if (!has(key)) return;
    try {
      target = parse(kv_.at(key));
    } catch (const std::exception& e) {
      errors_.push_back(key + ": cannot parse '" + kv_.at(key) + "' (" + e.what() + ")");
    }
  }

  void fail(const std::string& msg) { errors_.push_back(msg); }

  void finish() {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) errors_.push_back("unknown key '" + k + "'");
    if (errors_.empty()) return;
    std::string msg = "configuration errors:";
    for (const auto& e : errors_) msg += "\n  " + e;
    throw InputError(msg);
  }

 private:
  const std::map<std::string, std::string>& kv_;
  std::set<std::string> used_;
  std::vector<std::string> errors_;
};

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return static_cast<int>(v);
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t pos = 0;
  if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true/false");
}

std::vector<int> to_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& x : split_list(s)) out.push_back(to_int(x));
  return out;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& x : split_list(s)) out.push_back(to_double(x));
  return out;
}

std::vector<StreamId> to_streams(const std::string& s) {
  std::vector<StreamId> out;
  for (const auto& x : split_list(s)) {
    const auto colon = x.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected pair:stream");
    out.push_back({to_int(trim(x.substr(0, colon))), to_int(trim(x.substr(colon + 1))) - 1});
  }
  return out;
}

DimConvention to_dim(const std::string& s) {
  if (s == "n0") return DimConvention::kReceiveAntennas;
  if (s == "n0t") return DimConvention::kStackedDimension;
  throw std::invalid_argument("expected n0 or n0t");
}

CovarianceForm to_form(const std::string& s) {
  if (s == "stacked") return CovarianceForm::kStacked;
  if (s == "per-sample") return CovarianceForm::kPerSample;
  throw std::invalid_argument("expected stacked or per-sample");
}

SampleConvention to_convention(const std::string& s) {
  if (s == "real") return SampleConvention::kRealPart;
  if (s == "complex") return SampleConvention::kComplex;
  throw std::invalid_argument("expected real or complex");
}

void read_link(Reader& r, const std::string& prefix, LinkConfig& link) {
  r.get(prefix + ".M", link.tx_antennas, to_int);
  r.get(prefix + ".N", link.rx_antennas, to_int);
  r.get(prefix + ".d", link.streams, to_int);
  r.get(prefix + ".p", link.power_w, to_double);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw InputError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw InputError(where + ": empty key");
    if (!kv.emplace(key, value).second) throw InputError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

Scenario scenario_from_keys(const std::map<std::string, std::string>& kv) {
  Scenario s;
  Reader r(kv);

  int k = s.network.num_pairs();
  r.get("network.K", k, to_int);
  if (k < 1 || k > 64) {
    r.fail("network.K must lie in 1..64");
    k = s.network.num_pairs();
  }
  LinkConfig shared = s.network.pair(1);
  read_link(r, "network.pair", shared);
  NetworkConfig net;
  net.links.push_back(s.network.secondary());
  for (int i = 1; i <= k; ++i) {
    LinkConfig link = shared;
    read_link(r, "network.pair[" + std::to_string(i) + "]", link);
    net.links.push_back(link);
  }
  read_link(r, "secondary", net.secondary());
  net.noise_var = s.network.noise_var;
  r.get("noise_var", net.noise_var, to_double);
  s.network = net;
  // Per-pair keys beyond K are unknown keys.
  static const std::regex pair_key(R"(network\.pair\[(\d+)\]\.(M|N|d|p))");
  for (const auto& [key, value] : kv) {
    std::smatch m;
    if (std::regex_match(key, m, pair_key) && (std::stoi(m[1]) < 1 || std::stoi(m[1]) > k)) {
      r.fail("'" + key + "' refers to a pair outside 1..K");
      r.has(key);
    }
  }

  r.get("seed", s.seed, to_u64);
  r.get("scenario.name", s.name, [](const std::string& v) { return v; });
  r.get("scenario.trials", s.trials, to_int);
  r.get("scenario.snr_db", s.snr_db, to_doubles);
  r.get("scenario.tx_antennas", s.tx_antennas_grid, to_ints);
  r.get("scenario.rx_antennas", s.rx_antennas_grid, to_ints);
  r.get("scenario.ia_iterations", s.ia_iterations, to_int);
  r.get("scenario.workers", s.workers, to_int);
  r.get("scenario.silent", s.silent, to_streams);

  auto& sc = s.sensing;
  r.get("sensing.T", sc.smoothing, to_int);
  r.get("sensing.L", sc.count, to_int);
  r.get("sensing.fast_pfa", sc.fast_pfa, to_double);
  if (r.has("sensing.fast_eta")) r.get("sensing.fast_eta", sc.fast_eta, [](const std::string& v) {
    return std::optional<double>(to_double(v));
  });
  r.get("sensing.dim", sc.dim, to_dim);
  r.get("sensing.form", sc.form, to_form);
  r.get("sensing.enforce_T", sc.enforce_smoothing, to_bool);
  r.get("sensing.fine_T", sc.fine_samples, to_int);
  r.get("sensing.fine_pfa", sc.fine_pfa, to_double);
  if (r.has("sensing.fine_threshold")) {
    r.get("sensing.fine_threshold", sc.fine_threshold,
          [](const std::string& v) { return std::optional<double>(to_double(v)); });
  }
  r.get("sensing.convention", sc.convention, to_convention);
  r.get("sensing.T_grid", s.smoothing_grid, to_ints);
  r.get("sensing.fine_T_grid", s.fine_samples_grid, to_ints);
  r.get("sensing.eta_grid", s.eta_grid, to_doubles);
  r.get("sensing.pfa_targets", s.pfa_targets, to_doubles);
  sc.noise_var = s.network.noise_var;

  for (const auto& v : validate_config(s.network)) r.fail(v);
  r.finish();
  validate(s);
  validate(s.sensing);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return scenario_from_keys(parse_key_values(in, path.string()));
}

}  // namespace iacr
