#pragma once

#include "ssikit/core.hpp"
#include "ssikit/tensor.hpp"
#include "ssikit/observables.hpp"
#include "ssikit/states.hpp"
#include "ssikit/criteria.hpp"
#include "ssikit/lab.hpp"
#include "ssikit/identities.hpp"
#include "ssikit/io.hpp"
