#pragma once

#include <atomic>

namespace twistbeam {

/// Cooperative cancellation for long-running quadratures.
///
/// The token observes a flag owned by the caller; evaluation loops poll it
/// and abort by throwing OperationCancelled. A default-constructed token
/// never cancels. The flag must outlive every computation using the token.
class CancellationToken {
 public:
  CancellationToken() = default;
  explicit CancellationToken(const std::atomic<bool>* flag) : flag_(flag) {}

  bool cancelled() const noexcept {
    return flag_ != nullptr && flag_->load(std::memory_order_relaxed);
  }

 private:
  const std::atomic<bool>* flag_ = nullptr;
};

}  // namespace twistbeam
