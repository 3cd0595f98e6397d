#ifndef HOFM_HOFM_HPP_
#define HOFM_HOFM_HPP_

#include "hofm/analysis.hpp"
#include "hofm/bessel.hpp"
#include "hofm/errors.hpp"
#include "hofm/io.hpp"
#include "hofm/operator.hpp"
#include "hofm/patch.hpp"
#include "hofm/pm_reference.hpp"
#include "hofm/spectrum_predict.hpp"
#include "hofm/wavetable.hpp"

#endif  // HOFM_HOFM_HPP_
