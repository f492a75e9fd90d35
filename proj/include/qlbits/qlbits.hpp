#pragma once

#include "qlbits/error.hpp"
#include "qlbits/graphgen.hpp"
#include "qlbits/io.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/qlcore.hpp"
#include "qlbits/randwalk.hpp"
#include "qlbits/rng.hpp"
#include "qlbits/spectral.hpp"
#include "qlbits/twoqubit.hpp"
