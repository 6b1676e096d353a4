#include "psp/context.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

namespace psp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce a raw angle into [-pi, pi).
double reduce_angle(double phi) {
  double r = std::remainder(phi, kTwoPi);
  if (r >= std::numbers::pi) r -= kTwoPi;
  return r;
}

Complex unit_phase(double phi) {
  const double r = reduce_angle(phi);
  return {std::cos(r), std::sin(r)};
}

}  // namespace

const char* to_string(Binding b) {
  switch (b) {
    case Binding::Standard: return "standard";
    case Binding::Rotational: return "rotational";
    case Binding::Binary: return "binary";
    case Binding::Complex: return "complex";
    case Binding::OnePower: return "onepower";
  }
  return "unknown";
}

Binding binding_from_string(const std::string& name) {
  if (name == "standard") return Binding::Standard;
  if (name == "rotational") return Binding::Rotational;
  if (name == "binary") return Binding::Binary;
  if (name == "complex") return Binding::Complex;
  if (name == "onepower") return Binding::OnePower;
  throw ContractViolation("unknown binding family: " + name);
}

ContextKey::ContextKey(Payload payload) : payload_(std::move(payload)) {
  require(dim() >= 1, "ContextKey: dimension must be >= 1");
}

Binding ContextKey::family() const {
  switch (payload_.index()) {
    case 0: return Binding::Binary;
    case 1: return Binding::Complex;
    case 2: return Binding::OnePower;
    default: return Binding::Rotational;
  }
}

Index ContextKey::dim() const {
  if (auto* b = std::get_if<BinaryKey>(&payload_)) return b->signs.size();
  if (auto* c = std::get_if<ComplexKey>(&payload_)) return c->phases.size();
  if (auto* o = std::get_if<OnePowerKey>(&payload_)) return o->base ? o->base->size() : 0;
  return std::get<RotationalKey>(payload_).rotation.rows();
}

const BinaryKey& ContextKey::as_binary() const {
  require(std::holds_alternative<BinaryKey>(payload_), "key is not binary");
  return std::get<BinaryKey>(payload_);
}

const ComplexKey& ContextKey::as_complex() const {
  require(std::holds_alternative<ComplexKey>(payload_), "key is not complex");
  return std::get<ComplexKey>(payload_);
}

const OnePowerKey& ContextKey::as_onepower() const {
  require(std::holds_alternative<OnePowerKey>(payload_), "key is not onepower");
  return std::get<OnePowerKey>(payload_);
}

const RotationalKey& ContextKey::as_rotational() const {
  require(std::holds_alternative<RotationalKey>(payload_), "key is not rotational");
  return std::get<RotationalKey>(payload_);
}

CVec ContextKey::realized() const {
  const Index m = dim();
  CVec c(m);
  if (auto* b = std::get_if<BinaryKey>(&payload_)) {
    for (Index i = 0; i < m; ++i) c[i] = Complex(b->signs[i], 0.0);
  } else if (auto* cp = std::get_if<ComplexKey>(&payload_)) {
    for (Index i = 0; i < m; ++i) c[i] = unit_phase(cp->phases[i]);
  } else if (auto* op = std::get_if<OnePowerKey>(&payload_)) {
    const double k = static_cast<double>(op->power);
    for (Index i = 0; i < m; ++i) c[i] = unit_phase((*op->base)[i] * k);
  } else {
    throw ContractViolation("realized(): rotational keys have no diagonal form");
  }
  return c;
}

bool ContextKey::operator==(const ContextKey& other) const {
  if (payload_.index() != other.payload_.index()) return false;
  if (auto* b = std::get_if<BinaryKey>(&payload_))
    return b->signs == std::get<BinaryKey>(other.payload_).signs;
  if (auto* c = std::get_if<ComplexKey>(&payload_))
    return c->phases == std::get<ComplexKey>(other.payload_).phases;
  if (auto* o = std::get_if<OnePowerKey>(&payload_)) {
    const auto& p = std::get<OnePowerKey>(other.payload_);
    return o->power == p.power && (o->base == p.base || *o->base == *p.base);
  }
  return std::get<RotationalKey>(payload_).rotation ==
         std::get<RotationalKey>(other.payload_).rotation;
}

ContextKey gen_binary(Index m, SeededRng& rng) {
  require(m >= 1, "gen_binary: dimension must be >= 1");
  Vec signs(m);
  for (Index i = 0; i < m; ++i) signs[i] = rng.sign();
  return ContextKey(BinaryKey{std::move(signs)});
}

ContextKey gen_complex(Index m, SeededRng& rng) {
  require(m >= 1, "gen_complex: dimension must be >= 1");
  Vec phases(m);
  for (Index i = 0; i < m; ++i) phases[i] = rng.angle();
  return ContextKey(ComplexKey{std::move(phases)});
}

ContextKey gen_onepower(std::shared_ptr<const Vec> base, std::int64_t power) {
  require(base != nullptr && base->size() >= 1, "gen_onepower: base must be non-empty");
  return ContextKey(OnePowerKey{std::move(base), power});
}

ContextKey gen_onepower(const Vec& base, std::int64_t power) {
  return gen_onepower(std::make_shared<const Vec>(base), power);
}

ContextKey gen_rotational(Index m, SeededRng& rng) {
  require(m >= 1, "gen_rotational: dimension must be >= 1");
  return ContextKey(RotationalKey{sample_haar_orthogonal(m, rng)});
}

ContextKey identity_key(Binding family, Index m) {
  require(m >= 1, "identity_key: dimension must be >= 1");
  switch (family) {
    case Binding::Standard:
    case Binding::Binary:
      return ContextKey(BinaryKey{Vec::Ones(m)});
    case Binding::Complex:
      return ContextKey(ComplexKey{Vec::Zero(m)});
    case Binding::OnePower:
      return gen_onepower(std::make_shared<const Vec>(Vec::Zero(m)), 0);
    case Binding::Rotational:
      return ContextKey(RotationalKey{Mat::Identity(m, m)});
  }
  throw ContractViolation("identity_key: unknown family");
}

ContextKey invert(const ContextKey& key) {
  const auto& p = key.payload();
  if (auto* b = std::get_if<BinaryKey>(&p)) return ContextKey(BinaryKey{b->signs});
  if (auto* c = std::get_if<ComplexKey>(&p)) return ContextKey(ComplexKey{-c->phases});
  if (auto* o = std::get_if<OnePowerKey>(&p)) return ContextKey(OnePowerKey{o->base, -o->power});
  return ContextKey(RotationalKey{std::get<RotationalKey>(p).rotation.transpose()});
}

ContextKey compose(const ContextKey& a, const ContextKey& b) {
  require(a.family() == b.family(), "compose: family mismatch");
  require(a.dim() == b.dim(), "compose: dimension mismatch");
  const auto& pa = a.payload();
  const auto& pb = b.payload();
  if (auto* ba = std::get_if<BinaryKey>(&pa))
    return ContextKey(BinaryKey{ba->signs.cwiseProduct(std::get<BinaryKey>(pb).signs)});
  if (auto* ca = std::get_if<ComplexKey>(&pa))
    return ContextKey(ComplexKey{ca->phases + std::get<ComplexKey>(pb).phases});
  if (auto* oa = std::get_if<OnePowerKey>(&pa)) {
    const auto& ob = std::get<OnePowerKey>(pb);
    require(oa->base == ob.base || *oa->base == *ob.base,
            "compose: onepower keys must share a base");
    return ContextKey(OnePowerKey{oa->base, oa->power + ob.power});
  }
  return ContextKey(RotationalKey{std::get<RotationalKey>(pa).rotation *
                                  std::get<RotationalKey>(pb).rotation});
}

ContextKey mixture(const Vec& prev, const Vec& cur, const Vec& next) {
  require(prev.size() == cur.size() && cur.size() == next.size(),
          "mixture: phase vectors must share a length");
  require(prev.allFinite() && cur.allFinite() && next.allFinite(),
          "mixture: phases must be finite");
  return ContextKey(ComplexKey{(prev + cur + next) / 3.0});
}

Vec apply(const ContextKey& key, const Vec& x) {
  require(key.dim() == x.size(), "apply: dimension mismatch");
  const auto& p = key.payload();
  if (auto* b = std::get_if<BinaryKey>(&p)) return b->signs.cwiseProduct(x);
  if (auto* r = std::get_if<RotationalKey>(&p)) return r->rotation * x;
  throw ContractViolation("apply: phase-family keys produce complex output; lift x first");
}

CVec apply(const ContextKey& key, const CVec& x) {
  require(key.dim() == x.size(), "apply: dimension mismatch");
  const auto& p = key.payload();
  if (auto* r = std::get_if<RotationalKey>(&p)) {
    CVec y(x.size());
    y.real() = r->rotation * x.real();
    y.imag() = r->rotation * x.imag();
    return y;
  }
  return key.realized().cwiseProduct(x);
}

CVec apply_lifted(const ContextKey& key, const Vec& x) {
  CVec z(x.size());
  z.real() = x;
  z.imag().setZero();
  return apply(key, z);
}

ParamCount param_count(Binding mode, std::int64_t m, std::int64_t n, std::int64_t k) {
  require(m >= 1 && n >= 1 && k >= 1, "param_count: M, N, K must be >= 1");
  std::int64_t base = 0;
  std::int64_t per = 0;
  switch (mode) {
    case Binding::Standard:
      base = m * n;
      per = m * n;
      break;
    case Binding::Rotational:
      base = m * (n + m);
      per = m * m;
      break;
    case Binding::Binary:
      base = m * (n + 1);
      per = m;
      break;
    case Binding::Complex:
      base = 2 * m * n + m;  // 2M(N + 0.5)
      per = m;
      break;
    case Binding::OnePower:
      base = 2 * m * n + m;
      per = 1;
      break;
  }
  return {base + (k - 1) * per, per};
}

namespace {

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

nlohmann::json key_to_json(const ContextKey& key) {
  nlohmann::json j;
  j["family"] = to_string(key.family());
  j["m"] = key.dim();
  const auto& p = key.payload();
  if (auto* b = std::get_if<BinaryKey>(&p)) {
    std::vector<int> signs(static_cast<std::size_t>(b->signs.size()));
    for (Index i = 0; i < b->signs.size(); ++i)
      signs[static_cast<std::size_t>(i)] = b->signs[i] > 0 ? 1 : -1;
    j["signs"] = signs;
  } else if (auto* c = std::get_if<ComplexKey>(&p)) {
    j["phases"] = to_std(c->phases);
  } else if (auto* o = std::get_if<OnePowerKey>(&p)) {
    j["base"] = to_std(*o->base);
    j["power"] = o->power;
  } else {
    const auto& r = std::get<RotationalKey>(p);
    j["matrix"] = std::vector<double>(r.rotation.data(),
                                      r.rotation.data() + r.rotation.size());
  }
  return j;
}

ContextKey key_from_json(const nlohmann::json& j) {
  const Binding family = binding_from_string(j.at("family").get<std::string>());
  const auto m = j.at("m").get<Index>();
  require(m >= 1, "key_from_json: dimension must be >= 1");
  switch (family) {
    case Binding::Binary: {
      const auto signs = j.at("signs").get<std::vector<int>>();
      require(static_cast<Index>(signs.size()) == m, "key_from_json: sign count mismatch");
      Vec s(m);
      for (Index i = 0; i < m; ++i) {
        const int v = signs[static_cast<std::size_t>(i)];
        require(v == 1 || v == -1, "key_from_json: binary entries must be +-1");
        s[i] = v;
      }
      return ContextKey(BinaryKey{std::move(s)});
    }
    case Binding::Complex: {
      Vec phases = from_std(j.at("phases").get<std::vector<double>>());
      require(phases.size() == m, "key_from_json: phase count mismatch");
      return ContextKey(ComplexKey{std::move(phases)});
    }
    case Binding::OnePower: {
      Vec base = from_std(j.at("base").get<std::vector<double>>());
      require(base.size() == m, "key_from_json: base length mismatch");
      return gen_onepower(std::make_shared<const Vec>(std::move(base)),
                          j.at("power").get<std::int64_t>());
    }
    case Binding::Rotational: {
      const auto data = j.at("matrix").get<std::vector<double>>();
      require(static_cast<Index>(data.size()) == m * m, "key_from_json: matrix size mismatch");
      Mat c = Eigen::Map<const Mat>(data.data(), m, m);
      return ContextKey(RotationalKey{std::move(c)});
    }
    default:
      throw ContractViolation("key_from_json: standard mode has no key payload");
  }
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("key stream truncated");
  return v;
}

}  // namespace

void write_key(std::ostream& out, const ContextKey& key) {
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(key.family()));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(key.dim()));
  const auto& p = key.payload();
  if (auto* b = std::get_if<BinaryKey>(&p)) {
    for (Index i = 0; i < b->signs.size(); ++i)
      write_pod<std::int8_t>(out, b->signs[i] > 0 ? 1 : -1);
  } else if (auto* c = std::get_if<ComplexKey>(&p)) {
    out.write(reinterpret_cast<const char*>(c->phases.data()),
              static_cast<std::streamsize>(sizeof(double)) * c->phases.size());
  } else if (auto* o = std::get_if<OnePowerKey>(&p)) {
    out.write(reinterpret_cast<const char*>(o->base->data()),
              static_cast<std::streamsize>(sizeof(double)) * o->base->size());
    write_pod<std::int64_t>(out, o->power);
  } else {
    const auto& r = std::get<RotationalKey>(p);
    out.write(reinterpret_cast<const char*>(r.rotation.data()),
              static_cast<std::streamsize>(sizeof(double)) * r.rotation.size());
  }
}

ContextKey read_key(std::istream& in) {
  const auto family = static_cast<Binding>(read_pod<std::uint8_t>(in));
  const auto m = static_cast<Index>(read_pod<std::uint64_t>(in));
  require(m >= 1, "read_key: dimension must be >= 1");
  switch (family) {
    case Binding::Binary: {
      Vec signs(m);
      for (Index i = 0; i < m; ++i) {
        const auto s = read_pod<std::int8_t>(in);
        require(s == 1 || s == -1, "read_key: binary entries must be +-1");
        signs[i] = s;
      }
      return ContextKey(BinaryKey{std::move(signs)});
    }
    case Binding::Complex: {
      Vec phases(m);
      in.read(reinterpret_cast<char*>(phases.data()),
              static_cast<std::streamsize>(sizeof(double)) * m);
      if (!in) throw std::runtime_error("key stream truncated");
      return ContextKey(ComplexKey{std::move(phases)});
    }
    case Binding::OnePower: {
      Vec base(m);
      in.read(reinterpret_cast<char*>(base.data()),
              static_cast<std::streamsize>(sizeof(double)) * m);
      if (!in) throw std::runtime_error("key stream truncated");
      const auto power = read_pod<std::int64_t>(in);
      return gen_onepower(std::make_shared<const Vec>(std::move(base)), power);
    }
    case Binding::Rotational: {
      Mat c(m, m);
      in.read(reinterpret_cast<char*>(c.data()),
              static_cast<std::streamsize>(sizeof(double)) * m * m);
      if (!in) throw std::runtime_error("key stream truncated");
      return ContextKey(RotationalKey{std::move(c)});
    }
    default:
      throw std::runtime_error("read_key: unknown family tag");
  }
}

ContextRegistry::ContextRegistry(Binding mode, Index dim, SeededRng rng)
    : mode_(mode), dim_(dim), rng_(rng) {
  require(dim >= 1, "ContextRegistry: dimension must be >= 1");
  if (mode_ == Binding::OnePower) {
    SeededRng base_rng = rng_.child(0x0BA5E);
    Vec base(dim_);
    for (Index i = 0; i < dim_; ++i) base[i] = base_rng.angle();
    base_ = std::make_shared<const Vec>(std::move(base));
  }
}

ContextKey ContextRegistry::make_key(std::int64_t task_id) const {
  SeededRng task_rng = rng_.child(static_cast<std::uint64_t>(task_id));
  switch (mode_) {
    case Binding::Standard: return identity_key(Binding::Standard, dim_);
    case Binding::Binary: return gen_binary(dim_, task_rng);
    case Binding::Complex: return gen_complex(dim_, task_rng);
    case Binding::OnePower: return gen_onepower(base_, task_id);
    case Binding::Rotational: return gen_rotational(dim_, task_rng);
  }
  throw ContractViolation("ContextRegistry: unknown mode");
}

const ContextKey& ContextRegistry::key(std::int64_t task_id) {
  auto it = keys_.find(task_id);
  if (it == keys_.end()) it = keys_.emplace(task_id, make_key(task_id)).first;
  return it->second;
}

Vec ContextRegistry::phases(std::int64_t task_id) {
  const ContextKey& k = key(task_id);
  if (k.family() == Binding::Complex) return k.as_complex().phases;
  if (k.family() == Binding::OnePower) {
    const auto& op = k.as_onepower();
    return *op.base * static_cast<double>(op.power);
  }
  throw ContractViolation("phases(): only phase families expose raw angles");
}

nlohmann::json ContextRegistry::to_json() const {
  nlohmann::json j;
  j["mode"] = to_string(mode_);
  j["m"] = dim_;
  j["seed"] = rng_.seed();
  nlohmann::json keys = nlohmann::json::object();
  for (const auto& [task, key] : keys_) keys[std::to_string(task)] = key_to_json(key);
  j["keys"] = std::move(keys);
  return j;
}

ContextRegistry ContextRegistry::from_json(const nlohmann::json& j) {
  ContextRegistry reg(binding_from_string(j.at("mode").get<std::string>()),
                      j.at("m").get<Index>(), SeededRng(j.at("seed").get<std::uint64_t>()));
  for (const auto& [task, jk] : j.at("keys").items()) {
    const auto id = std::stoll(task);
    if (reg.mode_ == Binding::Standard) {
      reg.keys_.emplace(id, identity_key(Binding::Standard, reg.dim_));
    } else {
      reg.keys_.emplace(id, key_from_json(jk));
    }
  }
  return reg;
}

}  // namespace psp
