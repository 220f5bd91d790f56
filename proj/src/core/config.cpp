#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace advdrop {

namespace {

struct Field {
  const char* name;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw parse_error("invalid value '" + value + "' for config key '" + key +
                      "'");
  }
  return out;
}

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw parse_error("invalid value '" + value + "' for config key '" + key +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw parse_error("invalid value '" + value + "' for config key '" + key +
                    "' (expected true/false)");
}

std::string fmt_num(double v) { return fmt_double(v); }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"k_stage1",
       [](TrainConfig& c, const std::string& v) {
         c.k_stage1 = parse_number<std::int32_t>("k_stage1", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.k_stage1); }},
      {"k_stage2",
       [](TrainConfig& c, const std::string& v) {
         c.k_stage2 = parse_number<std::int32_t>("k_stage2", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.k_stage2); }},
      {"lr_main",
       [](TrainConfig& c, const std::string& v) {
         c.lr_main = parse_number<double>("lr_main", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.lr_main); }},
      {"lr_adv",
       [](TrainConfig& c, const std::string& v) {
         c.lr_adv = parse_number<double>("lr_adv", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.lr_adv); }},
      {"lambda",
       [](TrainConfig& c, const std::string& v) {
         c.lambda = parse_number<double>("lambda", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.lambda); }},
      {"tau",
       [](TrainConfig& c, const std::string& v) {
         c.tau = parse_number<double>("tau", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.tau); }},
      {"embed_dim",
       [](TrainConfig& c, const std::string& v) {
         c.embed_dim = parse_number<std::int32_t>("embed_dim", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.embed_dim); }},
      {"batch_size",
       [](TrainConfig& c, const std::string& v) {
         c.batch_size = parse_number<std::int32_t>("batch_size", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.batch_size); }},
      {"n_layers",
       [](TrainConfig& c, const std::string& v) {
         c.n_layers = parse_number<std::int32_t>("n_layers", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.n_layers); }},
      {"contrast_samples",
       [](TrainConfig& c, const std::string& v) {
         c.contrast_samples = parse_number<std::int32_t>("contrast_samples", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.contrast_samples); }},
      {"max_rounds",
       [](TrainConfig& c, const std::string& v) {
         c.max_rounds = parse_number<std::int32_t>("max_rounds", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.max_rounds); }},
      {"early_stop",
       [](TrainConfig& c, const std::string& v) {
         c.early_stop = parse_bool("early_stop", v);
       },
       [](const TrainConfig& c) {
         return std::string(c.early_stop ? "true" : "false");
       }},
      {"patience",
       [](TrainConfig& c, const std::string& v) {
         c.patience = parse_number<std::int32_t>("patience", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.patience); }},
      {"min_delta",
       [](TrainConfig& c, const std::string& v) {
         c.min_delta = parse_number<double>("min_delta", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.min_delta); }},
      {"val_fraction",
       [](TrainConfig& c, const std::string& v) {
         c.val_fraction = parse_number<double>("val_fraction", v);
       },
       [](const TrainConfig& c) { return fmt_num(c.val_fraction); }},
      {"val_k",
       [](TrainConfig& c, const std::string& v) {
         c.val_k = parse_number<std::int32_t>("val_k", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.val_k); }},
      {"seed",
       [](TrainConfig& c, const std::string& v) {
         c.seed = parse_number<std::uint64_t>("seed", v);
       },
       [](const TrainConfig& c) { return std::to_string(c.seed); }},
      {"ablation",
       [](TrainConfig& c, const std::string& v) {
         static const char* allowed[] = {"full", "no_pb", "no_pb_no_inv",
                                         "pop_drop", "backbone"};
         if (std::find(std::begin(allowed), std::end(allowed), v) ==
             std::end(allowed)) {
           throw parse_error(
               "invalid ablation '" + v +
               "' (valid: full, no_pb, no_pb_no_inv, pop_drop, backbone)");
         }
         c.ablation = v;
       },
       [](const TrainConfig& c) { return c.ablation; }},
  };
  return table;
}

}  // namespace

void TrainConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.name) {
      f.set(*this, value);
      return;
    }
  }
  std::string valid;
  for (const auto& f : fields()) {
    if (!valid.empty()) valid += ", ";
    valid += f.name;
  }
  throw parse_error("unknown config key '" + key + "' (valid keys: " + valid +
                    ")");
}

std::string TrainConfig::get(const std::string& key) const {
  for (const auto& f : fields()) {
    if (key == f.name) return f.get(*this);
  }
  throw parse_error("unknown config key '" + key + "'");
}

std::vector<std::string> TrainConfig::keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.name);
  return out;
}

TrainConfig TrainConfig::preset(const std::string& name) {
  TrainConfig c;
  if (name == "default" || name == "coat") {
    // coat defaults are the struct defaults
  } else if (name == "yahoo") {
    c.k_stage1 = 15;
    c.k_stage2 = 5;
    c.lr_main = 3e-3;
    c.lr_adv = 1e-3;
    c.embed_dim = 30;
    c.batch_size = 128;
  } else if (name == "synthetic") {
    c.embed_dim = 16;
    c.k_stage1 = 5;
    c.k_stage2 = 8;
    c.batch_size = 256;
    c.max_rounds = 60;
    c.early_stop = false;
    c.val_fraction = 0.0;
    c.val_k = 20;
  } else {
    throw parse_error("unknown preset '" + name +
                      "' (valid: default, coat, yahoo, synthetic)");
  }
  return c;
}

std::vector<std::string> TrainConfig::preset_names() {
  return {"default", "coat", "yahoo", "synthetic"};
}

void TrainConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::string TrainConfig::to_key_values() const {
  std::ostringstream out;
  for (const auto& f : fields()) {
    out << f.name << " = " << f.get(*this) << "\n";
  }
  return out.str();
}

void TrainConfig::validate() const {
  if (k_stage1 < 0 || k_stage2 < 0) {
    throw std::invalid_argument("stage epoch counts must be >= 0");
  }
  if (lr_main <= 0 || lr_adv <= 0) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (tau <= 0) throw std::invalid_argument("tau must be positive");
  if (embed_dim <= 0) throw std::invalid_argument("embed_dim must be > 0");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be > 0");
  if (n_layers < 0) throw std::invalid_argument("n_layers must be >= 0");
  if (contrast_samples <= 0) {
    throw std::invalid_argument("contrast_samples must be > 0");
  }
  if (max_rounds <= 0) throw std::invalid_argument("max_rounds must be > 0");
  if (patience <= 0) throw std::invalid_argument("patience must be > 0");
  if (val_fraction < 0 || val_fraction >= 1) {
    throw std::invalid_argument("val_fraction must be in [0, 1)");
  }
  if (val_k < 1) throw std::invalid_argument("val_k must be >= 1");
}

}  // namespace advdrop
