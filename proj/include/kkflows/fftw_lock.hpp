// FFTW planning is not thread-safe; every planner call in the library holds this lock.

#ifndef KKFLOWS_FFTW_LOCK_HPP
#define KKFLOWS_FFTW_LOCK_HPP

#include <mutex>

namespace kkflows {

std::mutex& fftw_planner_mutex();

}  // namespace kkflows

#endif  // KKFLOWS_FFTW_LOCK_HPP
