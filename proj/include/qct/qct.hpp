#pragma once

#include "qct/matrix_core.hpp"
#include "qct/weyl_ops.hpp"
#include "qct/channel_model.hpp"
#include "qct/qct_protocol.hpp"
#include "qct/decompositions.hpp"
#include "qct/runs.hpp"
