#include "phishguard/audit.hpp"

#include <mutex>

namespace phishguard::audit {

namespace {
std::mutex g_mutex;
FitHook g_hook;
}  // namespace

void set_fit_hook(FitHook hook) {
  std::lock_guard lock(g_mutex);
  g_hook = std::move(hook);
}

void clear_fit_hook() {
  std::lock_guard lock(g_mutex);
  g_hook = nullptr;
}

void notify_fit(std::string_view stage, const Matrix& X) {
  std::lock_guard lock(g_mutex);
  if (g_hook) g_hook(stage, X);
}

}  // namespace phishguard::audit
