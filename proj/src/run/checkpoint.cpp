#include "drs/run/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drs::run {

namespace {

constexpr const char* kMagic = "drs-checkpoint";
constexpr int kVersion = 1;

void write_vector(std::ostream& o, const char* tag,
                  const std::vector<double>& v) {
  o << tag << ' ' << v.size();
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof(buf), " %a", x);
    o << buf;
  }
  o << '\n';
}

std::vector<double> read_vector(std::istream& in, const std::string& tag) {
  std::string seen;
  size_t n = 0;
  if (!(in >> seen >> n) || seen != tag)
    throw std::runtime_error("checkpoint: expected " + tag + " block");
  std::vector<double> v(n);
  std::string tok;
  for (auto& x : v) {
    if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated " + tag);
    x = std::strtod(tok.c_str(), nullptr);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     std::span<const CheckpointItem> items) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  f << kMagic << ' ' << kVersion << ' ' << items.size() << '\n';
  for (const auto& it : items) {
    if (it.params.size() != it.spec.param_count())
      throw std::runtime_error("checkpoint: shape mismatch for " + it.name);
    f << "item " << it.name << '\n';
    f << "spec " << it.spec.input_dim << ' ' << it.spec.output_dim << ' '
      << (it.spec.activation == nn::Activation::Relu ? "relu" : "tanh") << ' '
      << it.spec.hidden_dims.size();
    for (int h : it.spec.hidden_dims) f << ' ' << h;
    f << '\n';
    f << "step_count " << it.params.step_count << '\n';
    write_vector(f, "values", it.params.values);
    write_vector(f, "adam_m", it.params.adam_m);
    write_vector(f, "adam_v", it.params.adam_v);
  }
  if (!f) throw std::runtime_error("checkpoint: write failed " + path);
}

std::vector<CheckpointItem> load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  size_t count = 0;
  if (!(f >> magic >> version >> count) || magic != kMagic)
    throw std::runtime_error("checkpoint: bad header in " + path);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));
  std::vector<CheckpointItem> items(count);
  for (auto& it : items) {
    std::string tag, act;
    if (!(f >> tag >> it.name) || tag != "item")
      throw std::runtime_error("checkpoint: expected item block");
    size_t nh = 0;
    if (!(f >> tag >> it.spec.input_dim >> it.spec.output_dim >> act >> nh) ||
        tag != "spec")
      throw std::runtime_error("checkpoint: expected spec block");
    if (act == "relu") it.spec.activation = nn::Activation::Relu;
    else if (act == "tanh") it.spec.activation = nn::Activation::Tanh;
    else throw std::runtime_error("checkpoint: unknown activation " + act);
    it.spec.hidden_dims.resize(nh);
    for (auto& h : it.spec.hidden_dims)
      if (!(f >> h)) throw std::runtime_error("checkpoint: truncated spec");
    if (!(f >> tag >> it.params.step_count) || tag != "step_count")
      throw std::runtime_error("checkpoint: expected step_count");
    it.params.values = read_vector(f, "values");
    it.params.adam_m = read_vector(f, "adam_m");
    it.params.adam_v = read_vector(f, "adam_v");
    it.params.grads.assign(it.params.values.size(), 0.0);
    const int expected = it.spec.param_count();
    if (it.params.size() != expected ||
        static_cast<int>(it.params.adam_m.size()) != expected ||
        static_cast<int>(it.params.adam_v.size()) != expected)
      throw std::runtime_error("checkpoint: shape mismatch for " + it.name);
  }
  return items;
}

const CheckpointItem& find_item(const std::vector<CheckpointItem>& items,
                                const std::string& name,
                                const nn::MlpSpec& expected) {
  for (const auto& it : items) {
    if (it.name != name) continue;
    if (it.spec.input_dim != expected.input_dim ||
        it.spec.output_dim != expected.output_dim ||
        it.spec.hidden_dims != expected.hidden_dims ||
        it.spec.activation != expected.activation)
      throw std::runtime_error("checkpoint: spec mismatch for " + name);
    return it;
  }
  throw std::runtime_error("checkpoint: missing item " + name);
}

}  // namespace drs::run
