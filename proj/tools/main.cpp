#include <malloc.h>

#include "lpdgcn/cli.hpp"

int main(int argc, char** argv) {
  // Training allocates and frees many short-lived matrices above glibc's
  // default mmap threshold; keeping them on the heap avoids a syscall per op.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return lpdgcn::run(argc, argv);
}
