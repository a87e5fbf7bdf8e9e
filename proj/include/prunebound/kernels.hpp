#pragma once

#include "prunebound/matrix.hpp"

namespace prunebound::kernels {

// OpenMP-parallel dense products. Each output row is produced by exactly the
// same loop nest as the serial reference, so results are bit-identical for
// any thread count.

// C = A B
Matrix gemm_nn(const Matrix& a, const Matrix& b);
// C = A^T B
Matrix gemm_tn(const Matrix& a, const Matrix& b);
// C = A B^T
Matrix gemm_nt(const Matrix& a, const Matrix& b);

namespace serial {

Matrix gemm_nn(const Matrix& a, const Matrix& b);
Matrix gemm_tn(const Matrix& a, const Matrix& b);
Matrix gemm_nt(const Matrix& a, const Matrix& b);

}  // namespace serial

}  // namespace prunebound::kernels
