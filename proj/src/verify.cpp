#include "convexp/verify.hpp"
