#include "firesig/error.hpp"
#include "firesig/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace firesig {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DegenerateShape: return "DegenerateShape";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoPlanesFound: return "NoPlanesFound";
    case ErrorKind::DegenerateBasis: return "DegenerateBasis";
    case ErrorKind::EmptyProjection: return "EmptyProjection";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

namespace {

std::atomic<int> thread_override{0};

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

}  // namespace

int max_threads() {
  if (int n = thread_override.load(); n > 0) return n;
  int n = hardware_threads();
  if (const char* env = std::getenv("FIRESIG_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && cap < n) n = static_cast<int>(cap);
  }
  return n < 1 ? 1 : n;
}

void set_max_threads(int n) { thread_override.store(n < 0 ? 0 : n); }

}  // namespace firesig
