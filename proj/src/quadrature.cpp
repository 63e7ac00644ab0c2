#include "slepf/quadrature.hpp"
