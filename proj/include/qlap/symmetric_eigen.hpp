// Copyright 2026 The qlap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense real symmetric eigensolver: Householder reduction to tridiagonal
 * form followed by implicit-shift QL iteration (the EISPACK tred2/tql2
 * pair). Results are sorted ascending and made reproducible inside
 * degenerate eigenvalue clusters, see canonicalize_clusters().
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"

namespace qlap {

struct SymmetricEigen {
    std::vector<double> values; ///< ascending
    RealMatrix vectors;         ///< column j belongs to values[j]
};

struct EigenOptions {
    /// Consecutive eigenvalues closer than this form one cluster.
    double cluster_gap = 1e-9;
    /// Minimum residual norm for a projected basis vector to be kept.
    double accept_tol = 1e-8;
    /// Components with |x| <= this are skipped when fixing signs.
    double sign_tol = 1e-9;
    bool compute_vectors = true;
};

namespace detail {

// Householder tridiagonalization. On entry v holds the matrix; on exit v
// holds the accumulated orthogonal transform, d the diagonal and e the
// subdiagonal (e[0] unused).
inline void tridiagonalize(RealMatrix &v, std::vector<double> &d,
                           std::vector<double> &e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
    }
    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) {
            scale += std::abs(d[k]);
        }
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] = 0.0;
            }
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k + 1 <= i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) {
                e[j] -= hh * d[j];
            }
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k + 1 <= i; ++k) {
                    v(k, j) -= (f * e[k] + g * d[k]);
                }
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) {
                d[k] = v(k, i + 1) / h;
            }
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) {
                    g += v(k, i + 1) * v(k, j);
                }
                for (std::size_t k = 0; k <= i; ++k) {
                    v(k, j) -= g * d[k];
                }
            }
        }
        for (std::size_t k = 0; k <= i; ++k) {
            v(k, i + 1) = 0.0;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), accumulating rotations into v.
inline void tridiagonal_ql(RealMatrix &v, std::vector<double> &d,
                           std::vector<double> &e) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    constexpr double eps = 0x1.0p-52;
    constexpr int max_iter = 64;
    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) {
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > max_iter) {
                    throw Error("symmetric eigensolver failed to converge");
                }
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) {
                    d[i] -= h;
                }
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, ii + 1);
                        v(k, ii + 1) = s * v(k, ii) + c * h;
                        v(k, ii) = c * v(k, ii) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

} // namespace detail

/// Makes eigenvectors reproducible: inside each cluster of (near) equal
/// eigenvalues the basis is rebuilt by projecting e_0, e_1, ... onto the
/// cluster span and Gram-Schmidt orthonormalizing; every column is then
/// signed so its first component above sign_tol is positive.
inline void canonicalize_clusters(SymmetricEigen &eig,
                                  const EigenOptions &opts = {}) {
    const std::size_t n = eig.values.size();
    RealMatrix &vec = eig.vectors;
    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin + 1;
        while (end < n &&
               eig.values[end] - eig.values[end - 1] < opts.cluster_gap) {
            ++end;
        }
        const std::size_t width = end - begin;
        if (width > 1) {
            std::vector<std::vector<double>> accepted;
            accepted.reserve(width);
            for (std::size_t basis = 0; basis < n && accepted.size() < width;
                 ++basis) {
                std::vector<double> p(n, 0.0);
                for (std::size_t c = begin; c < end; ++c) {
                    const double w = vec(basis, c);
                    for (std::size_t r = 0; r < n; ++r) {
                        p[r] += w * vec(r, c);
                    }
                }
                // two passes of modified Gram-Schmidt
                for (int pass = 0; pass < 2; ++pass) {
                    for (const auto &q : accepted) {
                        const double dot =
                            std::inner_product(q.begin(), q.end(), p.begin(), 0.0);
                        for (std::size_t r = 0; r < n; ++r) {
                            p[r] -= dot * q[r];
                        }
                    }
                }
                const double norm =
                    std::sqrt(std::inner_product(p.begin(), p.end(), p.begin(), 0.0));
                if (norm > opts.accept_tol) {
                    for (auto &x : p) {
                        x /= norm;
                    }
                    accepted.push_back(std::move(p));
                }
            }
            if (accepted.size() == width) {
                for (std::size_t c = 0; c < width; ++c) {
                    for (std::size_t r = 0; r < n; ++r) {
                        vec(r, begin + c) = accepted[c][r];
                    }
                }
            }
        }
        begin = end;
    }
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            const double x = vec(r, c);
            if (std::abs(x) > opts.sign_tol) {
                if (x < 0) {
                    for (std::size_t k = 0; k < n; ++k) {
                        vec(k, c) = -vec(k, c);
                    }
                }
                break;
            }
        }
    }
}

/// Full eigendecomposition of a symmetric matrix. Only the lower triangle
/// is trusted implicitly; callers pass exactly symmetric input.
inline SymmetricEigen symmetric_eigen(const RealMatrix &a,
                                      const EigenOptions &opts = {}) {
    if (a.rows() != a.cols()) {
        throw InvalidArgument("symmetric_eigen: matrix must be square");
    }
    const std::size_t n = a.rows();
    SymmetricEigen out;
    if (n == 0) {
        return out;
    }
    RealMatrix v = a;
    std::vector<double> d(n);
    std::vector<double> e(n);
    detail::tridiagonalize(v, d, e);
    detail::tridiagonal_ql(v, d, e);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    out.values.resize(n);
    out.vectors = RealMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = d[order[c]];
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, c) = v(r, order[c]);
        }
    }
    if (opts.compute_vectors) {
        canonicalize_clusters(out, opts);
    } else {
        out.vectors = RealMatrix();
    }
    return out;
}

} // namespace qlap
