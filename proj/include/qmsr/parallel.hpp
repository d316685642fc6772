#pragma once

#include <cstddef>
#include <functional>

#include "qmsr/types.hpp"

namespace qmsr {

// Worker cap for internal parallel loops. Reads QMSR_THREADS once; 0 or
// unset means hardware concurrency.
std::size_t thread_cap();

// Runs fn(i) for i in [begin, end) on up to thread_cap() workers with a
// static block partition. Each index must write only its own output slot so
// results cannot depend on scheduling. Exceptions from workers are rethrown.
void parallel_for(Index begin, Index end, const std::function<void(Index)>& fn);

}  // namespace qmsr
