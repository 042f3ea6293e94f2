#pragma once
namespace convexp { }
