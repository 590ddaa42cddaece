#pragma once

#include "sigma/errors.hpp"
#include "sigma/family.hpp"
#include "sigma/sigma_core.hpp"
#include "sigma/instances.hpp"
#include "sigma/io.hpp"
#include "sigma/checker.hpp"
#include "sigma/constructions.hpp"
#include "sigma/free_strong.hpp"
#include "sigma/net_sum.hpp"
#include "sigma/report.hpp"
#include "sigma/table_file.hpp"
