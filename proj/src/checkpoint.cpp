#include "gctm/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gctm {

namespace {

constexpr char kMagic[8] = {'G', 'C', 'T', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kSentinel = 0x63743031;  // end-of-file marker
constexpr std::uint8_t kKindGctm = 0;
constexpr std::uint8_t kKindDirichlet = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  }
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw std::runtime_error("checkpoint write failed");
  }
  template <typename T>
  void scalar(T v) {
    raw(&v, sizeof(T));
  }
  void matrix(const Matrix& m) {
    scalar<std::int64_t>(m.rows());
    scalar<std::int64_t>(m.cols());
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }
  void vector(const Vector& v) {
    scalar<std::int64_t>(v.size());
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  }
  void rowvector(const RowVector& v) {
    scalar<std::int64_t>(v.size());
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw std::runtime_error("cannot open checkpoint: " + path);
  }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw std::runtime_error("checkpoint truncated: " + path_);
    }
  }
  template <typename T>
  T scalar() {
    T v{};
    raw(&v, sizeof(T));
    return v;
  }
  std::int64_t dim() {
    const auto d = scalar<std::int64_t>();
    if (d < 0 || d > (1 << 28)) throw std::runtime_error("checkpoint corrupt: bad dimension");
    return d;
  }
  Matrix matrix() {
    const auto r = dim();
    const auto c = dim();
    Matrix m(r, c);
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }
  Vector vector() {
    const auto n = dim();
    Vector v(n);
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return v;
  }
  RowVector rowvector() {
    const auto n = dim();
    RowVector v(n);
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return v;
  }

 private:
  std::ifstream in_;
  std::string path_;
};

std::uint8_t read_header(Reader& r, const std::string& path) {
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  const auto version = r.scalar<std::uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                             " in " + path);
  }
  return r.scalar<std::uint8_t>();
}

void write_header(Writer& w, std::uint8_t kind) {
  w.raw(kMagic, sizeof(kMagic));
  w.scalar<std::uint32_t>(kVersion);
  w.scalar<std::uint8_t>(kind);
}

void write_moments(Writer& w, const AdamMoments& mom) {
  w.matrix(mom.m);
  w.matrix(mom.v);
}

AdamMoments read_moments(Reader& r) {
  AdamMoments mom;
  mom.m = r.matrix();
  mom.v = r.matrix();
  return mom;
}

}  // namespace

void save_checkpoint(const GctmState& state, const std::string& path) {
  Writer w(path);
  write_header(w, kKindGctm);
  const auto& cfg = state.config;
  w.scalar<std::int32_t>(cfg.K);
  w.scalar<std::int32_t>(cfg.V);
  w.scalar<std::int32_t>(cfg.layers);
  w.scalar<std::int32_t>(cfg.hidden_dim);
  w.scalar<std::int32_t>(cfg.input_dim);
  w.scalar<double>(cfg.sigma_beta);
  w.scalar<double>(cfg.sigma_w);
  w.scalar<double>(cfg.alpha);
  w.scalar<double>(cfg.init_stddev);
  w.scalar<double>(cfg.rho_init);
  w.scalar<std::uint8_t>(cfg.squash_rho ? 1 : 0);
  w.scalar<std::int32_t>(cfg.inner_steps);
  w.scalar<double>(cfg.adam.lr);
  w.scalar<double>(cfg.adam.beta1);
  w.scalar<double>(cfg.adam.beta2);
  w.scalar<double>(cfg.adam.eps);
  w.scalar<double>(cfg.local_vb.tol);
  w.scalar<std::int32_t>(cfg.local_vb.max_iter);

  w.scalar<std::int64_t>(state.t);
  w.vector(state.alpha);
  w.matrix(state.beta);
  w.matrix(state.prev_beta);
  w.scalar<std::int32_t>(state.gcn.layers());
  for (int l = 0; l < state.gcn.layers(); ++l) {
    w.matrix(state.gcn.weights[l]);
    w.rowvector(state.gcn.biases[l]);
    w.matrix(state.prev_gcn.weights[l]);
    w.rowvector(state.prev_gcn.biases[l]);
  }
  w.vector(state.rho_raw);

  w.scalar<std::int64_t>(state.adam.step);
  write_moments(w, state.adam.beta);
  w.scalar<std::int32_t>(static_cast<std::int32_t>(state.adam.weights.size()));
  for (std::size_t l = 0; l < state.adam.weights.size(); ++l) {
    write_moments(w, state.adam.weights[l]);
    write_moments(w, state.adam.biases[l]);
  }
  write_moments(w, state.adam.rho);
  w.scalar<std::uint32_t>(kSentinel);
}

GctmState load_checkpoint(const std::string& path) {
  Reader r(path);
  if (read_header(r, path) != kKindGctm) {
    throw std::runtime_error("checkpoint does not hold a GCTM state: " + path);
  }
  GctmState s;
  auto& cfg = s.config;
  cfg.K = r.scalar<std::int32_t>();
  cfg.V = r.scalar<std::int32_t>();
  cfg.layers = r.scalar<std::int32_t>();
  cfg.hidden_dim = r.scalar<std::int32_t>();
  cfg.input_dim = r.scalar<std::int32_t>();
  cfg.sigma_beta = r.scalar<double>();
  cfg.sigma_w = r.scalar<double>();
  cfg.alpha = r.scalar<double>();
  cfg.init_stddev = r.scalar<double>();
  cfg.rho_init = r.scalar<double>();
  cfg.squash_rho = r.scalar<std::uint8_t>() != 0;
  cfg.inner_steps = r.scalar<std::int32_t>();
  cfg.adam.lr = r.scalar<double>();
  cfg.adam.beta1 = r.scalar<double>();
  cfg.adam.beta2 = r.scalar<double>();
  cfg.adam.eps = r.scalar<double>();
  cfg.local_vb.tol = r.scalar<double>();
  cfg.local_vb.max_iter = r.scalar<std::int32_t>();

  s.t = r.scalar<std::int64_t>();
  s.alpha = r.vector();
  s.beta = r.matrix();
  s.prev_beta = r.matrix();
  const auto layers = r.scalar<std::int32_t>();
  if (layers < 1 || layers > 64) throw std::runtime_error("checkpoint corrupt: bad layer count");
  for (int l = 0; l < layers; ++l) {
    s.gcn.weights.push_back(r.matrix());
    s.gcn.biases.push_back(r.rowvector());
    s.prev_gcn.weights.push_back(r.matrix());
    s.prev_gcn.biases.push_back(r.rowvector());
  }
  s.rho_raw = r.vector();

  s.adam.opts = cfg.adam;
  s.adam.step = r.scalar<std::int64_t>();
  s.adam.beta = read_moments(r);
  const auto n_moment_layers = r.scalar<std::int32_t>();
  if (n_moment_layers != layers) {
    throw std::runtime_error("checkpoint corrupt: Adam layer count mismatch");
  }
  for (int l = 0; l < n_moment_layers; ++l) {
    s.adam.weights.push_back(read_moments(r));
    s.adam.biases.push_back(read_moments(r));
  }
  s.adam.rho = read_moments(r);
  if (r.scalar<std::uint32_t>() != kSentinel) {
    throw std::runtime_error("checkpoint corrupt: bad end marker in " + path);
  }
  return s;
}

void save_baseline_checkpoint(const DirichletGlobal& global, std::int64_t t,
                              const std::string& path) {
  Writer w(path);
  write_header(w, kKindDirichlet);
  w.scalar<std::int64_t>(t);
  w.matrix(global.lambda);
  w.scalar<std::uint32_t>(kSentinel);
}

DirichletGlobal load_baseline_checkpoint(const std::string& path, std::int64_t* t) {
  Reader r(path);
  if (read_header(r, path) != kKindDirichlet) {
    throw std::runtime_error("checkpoint does not hold a baseline state: " + path);
  }
  const auto stored_t = r.scalar<std::int64_t>();
  if (t != nullptr) *t = stored_t;
  DirichletGlobal g{r.matrix()};
  if (r.scalar<std::uint32_t>() != kSentinel) {
    throw std::runtime_error("checkpoint corrupt: bad end marker in " + path);
  }
  return g;
}

std::string checkpoint_kind(const std::string& path) {
  Reader r(path);
  return read_header(r, path) == kKindGctm ? "gctm" : "dirichlet";
}

}  // namespace gctm
