#pragma once

#include "rauzy/error.hpp"
#include "rauzy/graph.hpp"
#include "rauzy/random.hpp"
#include "rauzy/relation.hpp"
#include "rauzy/substitution.hpp"
#include "rauzy/torus.hpp"
#include "rauzy/verify.hpp"
#include "rauzy/word.hpp"
