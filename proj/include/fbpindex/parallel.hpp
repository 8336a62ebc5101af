// Copyright (c) 2026 The fbpindex Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

// Execution policy shared by all batch kernels.
//
// Every parallel kernel has the serial path as its reference: with equal
// inputs both paths must produce byte-identical results, which the test
// suite and the benchmark tool both assert.  Kernels achieve that by writing
// into preallocated slots (no reduction order depends on thread count).

#ifndef FBPINDEX_PARALLEL_HPP_
#define FBPINDEX_PARALLEL_HPP_

#include <cstddef>
#include <exception>
#include <utility>

namespace fbpindex {

enum class Exec { kSerial, kParallel };

namespace par {

// Runs fn(i) for i in [0, count).  With Exec::kParallel the iterations run
// under OpenMP when available; exceptions are captured and the first one is
// rethrown after the loop so a throwing iteration cannot terminate().
template <typename Fn>
void for_each_index(std::size_t count, Exec exec, Fn&& fn) {
  if (exec == Exec::kParallel && count > 1) {
    std::exception_ptr first_error = nullptr;
#if defined(FBPINDEX_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
      try {
        fn(static_cast<std::size_t>(i));
      } catch (...) {
#if defined(FBPINDEX_HAVE_OPENMP)
#pragma omp critical(fbpindex_par_error)
#endif
        {
          if (!first_error) first_error = std::current_exception();
        }
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  } else {
    for (std::size_t i = 0; i < count; ++i) fn(i);
  }
}

}  // namespace par
}  // namespace fbpindex

#endif  // FBPINDEX_PARALLEL_HPP_
