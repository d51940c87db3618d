#pragma once

#include <gtest/gtest.h>

#include "relsha/error.hpp"

// EXPECT_THROW plus a check of the relsha::Errc carried by the exception.
#define EXPECT_RELSHA_ERROR(statement, errc)                                        \
  do {                                                                              \
    bool caught_ = false;                                                           \
    try {                                                                           \
      statement;                                                                    \
    } catch (const ::relsha::Error& e_) {                                           \
      caught_ = true;                                                               \
      EXPECT_EQ(e_.code(), errc) << "message: " << e_.what();                       \
    }                                                                               \
    EXPECT_TRUE(caught_) << "expected relsha::Error(" << ::relsha::to_string(errc) << ")"; \
  } while (false)
