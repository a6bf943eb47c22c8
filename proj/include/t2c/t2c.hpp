#pragma once

#include "t2c/augment.hpp"
#include "t2c/cluster.hpp"
#include "t2c/core.hpp"
#include "t2c/eval.hpp"
#include "t2c/io.hpp"
#include "t2c/pca.hpp"
#include "t2c/profile.hpp"
#include "t2c/synthgen.hpp"
#include "t2c/window.hpp"
