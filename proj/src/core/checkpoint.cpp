#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace advdrop {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'V', 'D', 'C', 'K', 'P', '1'};

void put_i32(std::ostream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_doubles(std::ostream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p),
            static_cast<std::streamsize>(n * sizeof(double)));
}

std::int32_t get_i32(std::istream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void get_doubles(std::istream& in, double* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p),
          static_cast<std::streamsize>(n * sizeof(double)));
}

std::string get_blob(std::istream& in) {
  const auto len = get_u64(in);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_i32(out, ckpt.model.n_users());
  put_i32(out, ckpt.model.n_items());
  put_i32(out, ckpt.model.dim());
  put_i32(out, ckpt.model.n_layers);
  put_doubles(out, ckpt.model.user_embed.data(),
              static_cast<std::size_t>(ckpt.model.user_embed.size()));
  put_doubles(out, ckpt.model.item_embed.data(),
              static_cast<std::size_t>(ckpt.model.item_embed.size()));
  put_doubles(out, ckpt.head.w.data(),
              static_cast<std::size_t>(ckpt.head.w.size()));
  put_doubles(out, &ckpt.head.b, 1);
  const std::string cfg = ckpt.config.to_key_values();
  put_u64(out, cfg.size());
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  put_u64(out, ckpt.rng_state.size());
  out.write(ckpt.rng_state.data(),
            static_cast<std::streamsize>(ckpt.rng_state.size()));
  if (!out) throw io_error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw parse_error("not a checkpoint file: " + path);
  }
  Checkpoint c;
  const auto n_users = get_i32(in);
  const auto n_items = get_i32(in);
  const auto dim = get_i32(in);
  const auto n_layers = get_i32(in);
  if (n_users < 0 || n_items < 0 || dim <= 0 || n_layers < 0) {
    throw parse_error("corrupt checkpoint header: " + path);
  }
  c.model.n_layers = n_layers;
  c.model.user_embed.resize(n_users, dim);
  c.model.item_embed.resize(n_items, dim);
  get_doubles(in, c.model.user_embed.data(),
              static_cast<std::size_t>(c.model.user_embed.size()));
  get_doubles(in, c.model.item_embed.data(),
              static_cast<std::size_t>(c.model.item_embed.size()));
  c.head.w.resize(2 * dim);
  get_doubles(in, c.head.w.data(), static_cast<std::size_t>(c.head.w.size()));
  get_doubles(in, &c.head.b, 1);
  const std::string cfg_text = get_blob(in);
  std::istringstream cfg_in(cfg_text);
  std::string line;
  while (std::getline(cfg_in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    c.config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  c.rng_state = get_blob(in);
  if (!in) throw parse_error("truncated checkpoint: " + path);
  return c;
}

}  // namespace advdrop
