#include "liposim/error.hpp"
