#include "dynafit/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace dynafit {

int worker_count() {
    const int hardware = omp_get_num_procs();
    const char* env = std::getenv("DYNAFIT_THREADS");
    if (env == nullptr || *env == '\0')
        return hardware;
    try {
        const int requested = std::stoi(env);
        if (requested <= 0)
            return hardware;
        return requested;
    } catch (const std::exception&) {
        return hardware;
    }
}

}  // namespace dynafit
