#include <pybind11/pybind11.h>

PYBIND11_MODULE(_cocyclelab, m) { m.doc() = "placeholder"; }
