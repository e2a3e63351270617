#pragma once

#include "typeamalg/error.hpp"
#include "typeamalg/structures.hpp"
#include "typeamalg/typetrees.hpp"
#include "typeamalg/weaktypes.hpp"
#include "typeamalg/respect.hpp"
#include "typeamalg/amalgamation.hpp"
#include "typeamalg/ramsey.hpp"
#include "typeamalg/io.hpp"
