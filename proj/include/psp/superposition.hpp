#pragma once

#include <iosfwd>
#include <vector>

#include "psp/context.hpp"
#include "psp/types.hpp"

namespace psp {

/// One accumulated weight block holding every stored model. Binary and
/// rotational memories hold real weights; complex and onepower memories
/// hold complex weights (real models are lifted on store). Only the sum
/// is kept; recovering an individual model goes through retrieve().
class SuperposedMemory {
 public:
  SuperposedMemory(Binding family, Index inputs, Index outputs);

  Binding family() const { return family_; }
  Index inputs() const { return inputs_; }
  Index outputs() const { return outputs_; }
  std::int64_t count() const { return count_; }
  bool complex_field() const { return is_complex(family_); }

  /// W += w * C^{-1}. The real overload lifts w for complex families.
  void store(const Mat& w, const ContextKey& key);
  void store(const CMat& w, const ContextKey& key);

  /// W * C — the stored model for this key plus interference.
  Mat retrieve(const ContextKey& key) const;
  CMat retrieve_complex(const ContextKey& key) const;

  /// W * (C x); equal to retrieve(key) * x by associativity.
  Vec retrieve_apply(const ContextKey& key, const Vec& x) const;
  CVec retrieve_apply(const ContextKey& key, const CVec& x) const;
  CVec retrieve_apply_lifted(const ContextKey& key, const Vec& x) const;

  const Mat& weights() const;
  const CMat& weights_complex() const;
  Mat& mutable_weights();
  CMat& mutable_weights_complex();

  double weight_norm() const;

  void save(std::ostream& out) const;
  static SuperposedMemory load(std::istream& in);

 private:
  void check_key(const ContextKey& key) const;

  Binding family_;
  Index inputs_;
  Index outputs_;
  std::int64_t count_ = 0;
  Mat wr_;
  CMat wc_;
};

/// Companion that keeps plain copies of every stored (model, key) pair so
/// interference can be split out exactly. Used by verification suites and
/// tests; production training keeps only the SuperposedMemory.
class ModelLedger {
 public:
  ModelLedger(Binding family, Index inputs, Index outputs);

  void store(const Mat& w, const ContextKey& key);
  void store(const CMat& w, const ContextKey& key);

  const SuperposedMemory& memory() const { return mem_; }
  std::size_t size() const { return keys_.size(); }
  const ContextKey& key(std::size_t s) const { return keys_.at(s); }
  const Mat& model(std::size_t s) const { return real_models_.at(s); }
  const CMat& model_complex(std::size_t s) const { return complex_models_.at(s); }

  struct RealSplit {
    Vec signal;  // W(k) x
    Vec eps;     // sum over s != k of W(s) (c(s)^-1 c(k) x)
  };
  struct ComplexSplit {
    CVec signal;
    CVec eps;
  };

  /// Exact decomposition of retrieve_apply for stored model k: the
  /// recovered map applied to x plus the explicit interference sum.
  RealSplit residual(std::size_t k, const Vec& x) const;
  ComplexSplit residual(std::size_t k, const CVec& x) const;

  /// Same, addressed by key. Throws if the key was never stored.
  RealSplit residual(const ContextKey& key, const Vec& x) const;
  ComplexSplit residual(const ContextKey& key, const CVec& x) const;

 private:
  std::size_t index_of(const ContextKey& key) const;

  SuperposedMemory mem_;
  std::vector<ContextKey> keys_;
  std::vector<Mat> real_models_;
  std::vector<CMat> complex_models_;
};

}  // namespace psp
