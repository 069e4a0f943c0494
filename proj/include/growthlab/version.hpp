#pragma once

#define GROWTHLAB_VERSION "1.0.0"
