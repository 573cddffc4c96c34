#include "qpvlab/register.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpvlab {

void QuantumRegister::add(DensityOperator block) {
  for (const auto& l : block.factorization().labels())
    if (contains(l)) throw std::invalid_argument("QuantumRegister: label '" + l + "' already present");
  blocks_.push_back(std::move(block));
}

bool QuantumRegister::contains(const std::string& label) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const DensityOperator& b) {
    return b.factorization().contains(label);
  });
}

std::vector<std::string> QuantumRegister::labels() const {
  std::vector<std::string> out;
  for (const auto& b : blocks_)
    for (const auto& l : b.factorization().labels()) out.push_back(l);
  return out;
}

std::size_t QuantumRegister::block_index(const std::string& label) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].factorization().contains(label)) return i;
  throw std::invalid_argument("QuantumRegister: no subsystem '" + label + "'");
}

std::size_t QuantumRegister::merge(std::span<const std::string> labels) {
  std::vector<std::size_t> idx;
  for (const auto& l : labels) {
    const std::size_t i = block_index(l);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  if (idx.size() == 1) return idx.front();
  std::sort(idx.begin(), idx.end());
  std::size_t dim = 1;
  for (auto i : idx) dim *= blocks_[i].dim();
  if (dim > kMaxBlockDim) throw std::length_error("QuantumRegister: merged block too large");
  DensityOperator merged = blocks_[idx.front()];
  for (std::size_t k = 1; k < idx.size(); ++k) merged = tensor(merged, blocks_[idx[k]]);
  for (std::size_t k = idx.size(); k-- > 1;)
    blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(idx[k]));
  blocks_[idx.front()] = std::move(merged);
  return idx.front();
}

DensityOperator QuantumRegister::state_of(std::span<const std::string> labels) const {
  QuantumRegister copy = *this;
  const std::size_t b = copy.merge(labels);
  return permute(partial_trace(copy.blocks_[b], labels), labels);
}

std::size_t QuantumRegister::measure_and_discard(std::span<const std::string> labels,
                                                 const Povm& povm, Rng& rng) {
  const std::size_t b = merge(labels);
  const auto& fac = blocks_[b].factorization();
  if (povm.dim() != fac.dim_of(labels))
    throw std::invalid_argument("measure_and_discard: POVM dimension mismatch");
  if (fac.size() == labels.size() && std::equal(labels.begin(), labels.end(), fac.parts().begin(),
                                                [](const std::string& l, const Subsystem& p) {
                                                  return l == p.label;
                                                })) {
    // Whole block measured in its own order: only the probabilities matter.
    const auto& rho = blocks_[b].matrix();
    std::vector<double> probs;
    probs.reserve(povm.size());
    for (const auto& m : povm.elements()) {
      double p = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) p += (m(i, j) * rho(j, i)).real();
      probs.push_back(std::max(p, 0.0));
    }
    const std::size_t k = rng.sample(probs);
    blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
    return k;
  }
  std::vector<std::string> order(labels.begin(), labels.end());
  const Factorization rest = fac.without(labels);
  for (const auto& l : rest.labels()) order.push_back(l);
  const auto moved = permute(blocks_[b], order);
  const auto& rho = moved.matrix();
  const std::size_t ds = povm.dim();
  const std::size_t dr = rho.rows() / ds;

  // R_k = tr_S[(M_k (x) I) rho]; p_k = tr R_k.
  std::vector<ComplexMatrix> reduced;
  std::vector<double> probs;
  for (const auto& m : povm.elements()) {
    ComplexMatrix r(dr, dr);
    for (std::size_t i = 0; i < ds; ++i)
      for (std::size_t j = 0; j < ds; ++j) {
        const Complex mij = m(i, j);
        if (mij == Complex{}) continue;
        for (std::size_t x = 0; x < dr; ++x)
          for (std::size_t y = 0; y < dr; ++y) r(x, y) += mij * rho(j * dr + x, i * dr + y);
      }
    probs.push_back(std::max(r.trace().real(), 0.0));
    reduced.push_back(std::move(r));
  }
  const std::size_t k = rng.sample(probs);
  if (rest.empty()) {
    blocks_.erase(blocks_.begin() + static_cast<std::ptrdiff_t>(b));
  } else {
    reduced[k] *= Complex(1.0 / probs[k]);
    blocks_[b] = DensityOperator::unchecked(std::move(reduced[k]), rest);
  }
  return k;
}

}  // namespace qpvlab
