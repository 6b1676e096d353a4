#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "psp/linalg.hpp"
#include "psp/rng.hpp"
#include "psp/types.hpp"

namespace psp {

/// Binding family used to key task models. Standard means "no binding":
/// every task shares the identity key and the model behaves like a plain
/// network.
enum class Binding { Standard, Rotational, Binary, Complex, OnePower };

const char* to_string(Binding b);
Binding binding_from_string(const std::string& name);

/// True for the families whose keys act element-wise (diagonal unitary).
inline bool is_diagonal(Binding b) { return b != Binding::Rotational; }

/// True for the families realized over the complex field.
inline bool is_complex(Binding b) { return b == Binding::Complex || b == Binding::OnePower; }

struct BinaryKey {
  Vec signs;  // entries exactly -1.0 or +1.0
};

struct ComplexKey {
  Vec phases;  // raw angles; composition adds them, realization reduces mod 2pi
};

struct OnePowerKey {
  std::shared_ptr<const Vec> base;  // shared across every key of one registry
  std::int64_t power = 0;
};

struct RotationalKey {
  Mat rotation;  // orthogonal M x M
};

/// A task key: one of the four unitary binding families.
class ContextKey {
 public:
  using Payload = std::variant<BinaryKey, ComplexKey, OnePowerKey, RotationalKey>;

  explicit ContextKey(Payload payload);

  Binding family() const;
  Index dim() const;
  bool diagonal() const { return is_diagonal(family()); }

  const Payload& payload() const { return payload_; }
  const BinaryKey& as_binary() const;
  const ComplexKey& as_complex() const;
  const OnePowerKey& as_onepower() const;
  const RotationalKey& as_rotational() const;

  /// Realized unit-modulus diagonal for the diagonal families.
  /// Binary realizes to exactly +-1 + 0i; phase families reduce their raw
  /// angles into [-pi, pi) before exponentiation. Throws for Rotational.
  CVec realized() const;

  bool operator==(const ContextKey& other) const;

 private:
  Payload payload_;
};

ContextKey gen_binary(Index m, SeededRng& rng);
ContextKey gen_complex(Index m, SeededRng& rng);
ContextKey gen_onepower(std::shared_ptr<const Vec> base, std::int64_t power);
ContextKey gen_onepower(const Vec& base, std::int64_t power);
ContextKey gen_rotational(Index m, SeededRng& rng);

/// Identity key of a family. OnePower callers must supply their base via
/// gen_onepower(base, 0); Standard maps to the binary all-ones key.
ContextKey identity_key(Binding family, Index m);

/// Key with apply(invert(k), apply(k, x)) == x.
ContextKey invert(const ContextKey& key);

/// Key with apply(compose(a, b), x) == apply(a, apply(b, x)).
/// Families must match; OnePower additionally requires a shared base.
ContextKey compose(const ContextKey& a, const ContextKey& b);

/// Averaged-phase key over a three-context window. The mean is taken on
/// the raw angles with no wrap-around correction, so windows straddling
/// the -pi/pi cut mix discontinuously.
ContextKey mixture(const Vec& prev, const Vec& cur, const Vec& next);

/// Bind x with the key. The real overload serves the real-field families
/// (Binary, Rotational); phase-family keys require the complex overload,
/// with apply_lifted() as the convenience for real inputs.
Vec apply(const ContextKey& key, const Vec& x);
CVec apply(const ContextKey& key, const CVec& x);
CVec apply_lifted(const ContextKey& key, const Vec& x);

struct ParamCount {
  std::int64_t total = 0;           // parameters for k models in superposition
  std::int64_t per_new_model = 0;   // additional parameters for one more model
};

/// Parameter accounting for an M x N transformation under each binding
/// family (complex weights count as two reals).
ParamCount param_count(Binding mode, std::int64_t m, std::int64_t n, std::int64_t k);

nlohmann::json key_to_json(const ContextKey& key);
ContextKey key_from_json(const nlohmann::json& j);
void write_key(std::ostream& out, const ContextKey& key);
ContextKey read_key(std::istream& in);

/// Per-task key store for one binding family and dimension. Keys are
/// derived from (seed, task id), so lookup order never changes them.
/// OnePower keeps a single shared base; task k's key is base^k.
class ContextRegistry {
 public:
  ContextRegistry(Binding mode, Index dim, SeededRng rng);

  Binding mode() const { return mode_; }
  Index dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }

  /// Key for the task, created deterministically on first use.
  const ContextKey& key(std::int64_t task_id);

  /// Phase vector backing a task's key (Complex/OnePower only); used to
  /// build mixture keys over schedule windows.
  Vec phases(std::int64_t task_id);

  const std::shared_ptr<const Vec>& onepower_base() const { return base_; }

  nlohmann::json to_json() const;
  static ContextRegistry from_json(const nlohmann::json& j);

 private:
  ContextKey make_key(std::int64_t task_id) const;

  Binding mode_;
  Index dim_;
  SeededRng rng_;
  std::shared_ptr<const Vec> base_;  // OnePower only
  std::map<std::int64_t, ContextKey> keys_;
};

}  // namespace psp
