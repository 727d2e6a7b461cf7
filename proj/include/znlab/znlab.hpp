#pragma once

#include "znlab/commutator.hpp"
#include "znlab/error.hpp"
#include "znlab/format.hpp"
#include "znlab/kp.hpp"
#include "znlab/lab.hpp"
#include "znlab/operator_expr.hpp"
#include "znlab/operators.hpp"
#include "znlab/orlicz.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/sampling.hpp"
#include "znlab/seqcore.hpp"
