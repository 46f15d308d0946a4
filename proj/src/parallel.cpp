#include "shiryaev/parallel.hpp"

#include <omp.h>

namespace shiryaev {

int max_threads() { return omp_get_max_threads(); }

}  // namespace shiryaev
