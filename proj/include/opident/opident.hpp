#pragma once

#include "opident/consequences.hpp"
#include "opident/error.hpp"
#include "opident/families.hpp"
#include "opident/generic_rank.hpp"
#include "opident/io.hpp"
#include "opident/linalg.hpp"
#include "opident/linear_form.hpp"
#include "opident/modular.hpp"
#include "opident/monomial.hpp"
#include "opident/operad.hpp"
#include "opident/polynomial.hpp"
#include "opident/rational.hpp"
#include "opident/search.hpp"
