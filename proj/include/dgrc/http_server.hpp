#pragma once

#include "dgrc/backend.hpp"
#include "httplib.h"

namespace dgrc {

// Serves POST /v1/generate and /v1/score from `backend`. Malformed requests
// get 400, backend failures 500.
void mount_wire_routes(httplib::Server& server, Backend& backend);

}  // namespace dgrc
