#pragma once

namespace bioaudit {

inline const char* version_string() { return "0.1.0"; }

}  // namespace bioaudit
