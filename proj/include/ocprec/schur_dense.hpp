#pragma once

#include "ocprec/kkt.hpp"
#include "ocprec/schur.hpp"

namespace ocprec {

// Dense diagnostic matrices for one active set. Desk scale only.
struct DenseSchurSet {
  DenseMatrix S;       // B A^{-1} B'
  DenseMatrix SS;      // leading block after the R congruence
  DenseMatrix Shat;    // (1/nu) R blkdiag(L1 M^{-1} L1', D) R'
  DenseMatrix SShat;   // L1 M^{-1} L1'
  DenseMatrix F;       // sqrt(nu) M^{-1/2} L M^{-1/2}
  DenseMatrix G;
  DenseMatrix H;
  DenseMatrix Hhat;    // M^{-1/2} SShat M^{-1/2}
  DenseMatrix R;
  DenseMatrix D;
};

constexpr Index kDenseLimit = 4000;

// F, G, H and Hhat only; the part needed for pencil extremes.
struct ScaledPencil {
  DenseMatrix F;
  DenseMatrix G;
  DenseMatrix H;
  DenseMatrix Hhat;
};

ScaledPencil build_scaled_pencil(const DiscreteProblem& problem, const ActiveSet& active);

DenseSchurSet build_true_schur_dense(const DiscreteProblem& problem, const ActiveSet& active);

// Dense blocks of the Newton matrix partitioned as [A B'; B 0].
struct DenseSaddleBlocks {
  DenseMatrix A;
  DenseMatrix B;
};
DenseSaddleBlocks dense_saddle_blocks(const DiscreteProblem& problem, const ActiveSet& active);

}  // namespace ocprec
