#pragma once

#include "zfexp/contractions.hpp"
#include "zfexp/core.hpp"
#include "zfexp/expansion.hpp"
#include "zfexp/fock.hpp"
#include "zfexp/io.hpp"
#include "zfexp/kernel.hpp"
#include "zfexp/permutation.hpp"
#include "zfexp/random.hpp"
#include "zfexp/scattering.hpp"
#include "zfexp/verify.hpp"
#include "zfexp/warped.hpp"
#include "zfexp/zops.hpp"
