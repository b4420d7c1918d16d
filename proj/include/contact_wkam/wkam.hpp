#ifndef CONTACT_WKAM_WKAM_HPP
#define CONTACT_WKAM_WKAM_HPP

// Umbrella header for the whole toolkit.

#include "contact_wkam/action.hpp"
#include "contact_wkam/config.hpp"
#include "contact_wkam/domain.hpp"
#include "contact_wkam/flow.hpp"
#include "contact_wkam/io.hpp"
#include "contact_wkam/model.hpp"
#include "contact_wkam/semigroup.hpp"
#include "contact_wkam/sets.hpp"

#endif
