#include "psp/superposition.hpp"

#include <istream>
#include <ostream>

namespace psp {

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("memory checkpoint truncated");
  return v;
}

constexpr char kMemMagic[8] = {'P', 'S', 'P', 'M', 'E', 'M', '0', '1'};

}  // namespace

SuperposedMemory::SuperposedMemory(Binding family, Index inputs, Index outputs)
    : family_(family), inputs_(inputs), outputs_(outputs) {
  require(family != Binding::Standard, "SuperposedMemory: standard mode has no binding");
  require(inputs >= 1 && outputs >= 1, "SuperposedMemory: dimensions must be >= 1");
  if (complex_field()) {
    wc_ = CMat::Zero(outputs, inputs);
  } else {
    wr_ = Mat::Zero(outputs, inputs);
  }
}

void SuperposedMemory::check_key(const ContextKey& key) const {
  require(key.family() == family_, "key family does not match memory family");
  require(key.dim() == inputs_, "key dimension does not match memory inputs");
}

void SuperposedMemory::store(const Mat& w, const ContextKey& key) {
  if (complex_field()) {
    store(CMat(w.cast<Complex>()), key);
    return;
  }
  check_key(key);
  require(w.rows() == outputs_ && w.cols() == inputs_, "store: model shape mismatch");
  require(all_finite(w), "store: model entries must be finite");
  if (family_ == Binding::Binary) {
    wr_ += w * key.as_binary().signs.asDiagonal();
  } else {
    wr_ += w * key.as_rotational().rotation.transpose();
  }
  ++count_;
}

void SuperposedMemory::store(const CMat& w, const ContextKey& key) {
  require(complex_field(), "store: real-field memory cannot take a complex model");
  check_key(key);
  require(w.rows() == outputs_ && w.cols() == inputs_, "store: model shape mismatch");
  require(all_finite(w), "store: model entries must be finite");
  wc_ += w * key.realized().conjugate().asDiagonal();
  ++count_;
}

Mat SuperposedMemory::retrieve(const ContextKey& key) const {
  require(!complex_field(), "retrieve: use retrieve_complex for phase families");
  check_key(key);
  if (family_ == Binding::Binary) return wr_ * key.as_binary().signs.asDiagonal();
  return wr_ * key.as_rotational().rotation;
}

CMat SuperposedMemory::retrieve_complex(const ContextKey& key) const {
  require(complex_field(), "retrieve_complex: memory holds real weights");
  check_key(key);
  return wc_ * key.realized().asDiagonal();
}

Vec SuperposedMemory::retrieve_apply(const ContextKey& key, const Vec& x) const {
  require(!complex_field(), "retrieve_apply: complex memory needs a complex x");
  check_key(key);
  require(x.size() == inputs_, "retrieve_apply: input length mismatch");
  return wr_ * apply(key, x);
}

CVec SuperposedMemory::retrieve_apply(const ContextKey& key, const CVec& x) const {
  check_key(key);
  require(x.size() == inputs_, "retrieve_apply: input length mismatch");
  const CVec bound = apply(key, x);
  if (complex_field()) return wc_ * bound;
  CVec y(outputs_);
  y.real() = wr_ * bound.real();
  y.imag() = wr_ * bound.imag();
  return y;
}

CVec SuperposedMemory::retrieve_apply_lifted(const ContextKey& key, const Vec& x) const {
  CVec z(x.size());
  z.real() = x;
  z.imag().setZero();
  return retrieve_apply(key, z);
}

const Mat& SuperposedMemory::weights() const {
  require(!complex_field(), "weights(): memory is complex");
  return wr_;
}

const CMat& SuperposedMemory::weights_complex() const {
  require(complex_field(), "weights_complex(): memory is real");
  return wc_;
}

Mat& SuperposedMemory::mutable_weights() {
  require(!complex_field(), "mutable_weights(): memory is complex");
  return wr_;
}

CMat& SuperposedMemory::mutable_weights_complex() {
  require(complex_field(), "mutable_weights_complex(): memory is real");
  return wc_;
}

double SuperposedMemory::weight_norm() const {
  return complex_field() ? wc_.norm() : wr_.norm();
}

void SuperposedMemory::save(std::ostream& out) const {
  out.write(kMemMagic, sizeof(kMemMagic));
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(family_));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(inputs_));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(outputs_));
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(count_));
  if (complex_field()) {
    out.write(reinterpret_cast<const char*>(wc_.data()),
              static_cast<std::streamsize>(sizeof(Complex)) * wc_.size());
  } else {
    out.write(reinterpret_cast<const char*>(wr_.data()),
              static_cast<std::streamsize>(sizeof(double)) * wr_.size());
  }
}

SuperposedMemory SuperposedMemory::load(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMemMagic, sizeof(magic)) != 0)
    throw std::runtime_error("memory checkpoint: bad magic");
  const auto family = static_cast<Binding>(read_pod<std::uint8_t>(in));
  const auto inputs = static_cast<Index>(read_pod<std::uint64_t>(in));
  const auto outputs = static_cast<Index>(read_pod<std::uint64_t>(in));
  const auto count = static_cast<std::int64_t>(read_pod<std::uint64_t>(in));
  SuperposedMemory mem(family, inputs, outputs);
  mem.count_ = count;
  if (mem.complex_field()) {
    in.read(reinterpret_cast<char*>(mem.wc_.data()),
            static_cast<std::streamsize>(sizeof(Complex)) * mem.wc_.size());
  } else {
    in.read(reinterpret_cast<char*>(mem.wr_.data()),
            static_cast<std::streamsize>(sizeof(double)) * mem.wr_.size());
  }
  if (!in) throw std::runtime_error("memory checkpoint truncated");
  return mem;
}

ModelLedger::ModelLedger(Binding family, Index inputs, Index outputs)
    : mem_(family, inputs, outputs) {}

void ModelLedger::store(const Mat& w, const ContextKey& key) {
  if (mem_.complex_field()) {
    store(CMat(w.cast<Complex>()), key);
    return;
  }
  mem_.store(w, key);
  keys_.push_back(key);
  real_models_.push_back(w);
}

void ModelLedger::store(const CMat& w, const ContextKey& key) {
  mem_.store(w, key);
  keys_.push_back(key);
  complex_models_.push_back(w);
}

std::size_t ModelLedger::index_of(const ContextKey& key) const {
  for (std::size_t s = 0; s < keys_.size(); ++s)
    if (keys_[s] == key) return s;
  throw ContractViolation("residual: key not present in ledger");
}

ModelLedger::RealSplit ModelLedger::residual(std::size_t k, const Vec& x) const {
  require(!mem_.complex_field(), "residual: complex ledger needs complex x");
  require(k < keys_.size(), "residual: index out of range");
  RealSplit split;
  split.signal = real_models_[k] * x;
  split.eps = Vec::Zero(mem_.outputs());
  for (std::size_t s = 0; s < keys_.size(); ++s) {
    if (s == k) continue;
    // W(s) applied to x routed through s's inverse key then k's key.
    split.eps += real_models_[s] * apply(compose(invert(keys_[s]), keys_[k]), x);
  }
  return split;
}

ModelLedger::ComplexSplit ModelLedger::residual(std::size_t k, const CVec& x) const {
  require(mem_.complex_field(), "residual: real ledger takes real x");
  require(k < keys_.size(), "residual: index out of range");
  ComplexSplit split;
  split.signal = complex_models_[k] * x;
  split.eps = CVec::Zero(mem_.outputs());
  for (std::size_t s = 0; s < keys_.size(); ++s) {
    if (s == k) continue;
    split.eps += complex_models_[s] * apply(compose(invert(keys_[s]), keys_[k]), x);
  }
  return split;
}

ModelLedger::RealSplit ModelLedger::residual(const ContextKey& key, const Vec& x) const {
  return residual(index_of(key), x);
}

ModelLedger::ComplexSplit ModelLedger::residual(const ContextKey& key, const CVec& x) const {
  return residual(index_of(key), x);
}

}  // namespace psp
