#include "convexp/cli.hpp"
