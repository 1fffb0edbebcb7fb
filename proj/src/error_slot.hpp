#pragma once

#include <exception>

namespace dcl::detail {

// First exception thrown inside an OpenMP region, rethrown once the region has joined.
class ErrorSlot {
 public:
  void capture() {
#pragma omp critical(dcl_error_slot)
    if (!first_) first_ = std::current_exception();
  }
  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::exception_ptr first_;
};

}  // namespace dcl::detail
