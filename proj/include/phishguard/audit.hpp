#pragma once

#include <functional>
#include <string_view>

#include "phishguard/matrix.hpp"

namespace phishguard::audit {

/// Instrumentation hook invoked with the design matrix of every fitting
/// routine (scaler, SMOTE, ANOVA, PCA, model training). Used by the
/// leakage tests; a no-op when unset.
using FitHook = std::function<void(std::string_view stage, const Matrix& X)>;

void set_fit_hook(FitHook hook);
void clear_fit_hook();
void notify_fit(std::string_view stage, const Matrix& X);

/// RAII installation of a hook for the lifetime of the guard.
class ScopedFitHook {
 public:
  explicit ScopedFitHook(FitHook hook) { set_fit_hook(std::move(hook)); }
  ~ScopedFitHook() { clear_fit_hook(); }
  ScopedFitHook(const ScopedFitHook&) = delete;
  ScopedFitHook& operator=(const ScopedFitHook&) = delete;
};

}  // namespace phishguard::audit
