# /core/errors.py
"""
Иерархия исключений проекта.

Каждое исключение знает свой код выхода для CLI:
1 - ошибка использования, 2 - ошибка данных, 3 - численный сбой.
"""


class SymfilterError(Exception):
    """Базовое исключение проекта"""

    exit_code = 2


class UsageError(SymfilterError):
    """Неверные аргументы командной строки"""

    exit_code = 1


class ConfigError(SymfilterError):
    """Недопустимые значения в конфигурации"""


# --- Символьная часть ---

class ExprError(SymfilterError):
    """Общая ошибка работы с деревом выражения"""


class InfixSyntaxError(ExprError):
    """Синтаксическая ошибка в инфиксной записи уравнения"""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (позиция {offset})")
        self.offset = offset


class UnknownSymbol(ExprError):
    """Идентификатор вне грамматики"""

    def __init__(self, name: str, offset: int):
        super().__init__(f"Неизвестный символ '{name}' (позиция {offset})")
        self.name = name
        self.offset = offset


class UnsupportedNode(ExprError):
    """Узел дерева не поддерживается выбранной операцией или диалектом"""


class DecodeError(ExprError):
    """Последовательность токенов не декодируется в уравнение"""


class DivisionByZero(ExprError):
    """Деление на ноль при свёртке констант"""


# --- Численная часть ---

class NumericError(SymfilterError):
    """Общий численный сбой"""

    exit_code = 3


class CFLViolation(NumericError):
    """Шаг по времени превышает допустимый по условию CFL"""


class NonFinite(NumericError):
    """В решении появились inf или nan"""


class AllWeightsDegenerate(NumericError):
    """Все частицы получили нулевой вес"""


class DegenerateReference(NumericError):
    """Эталон для метрики вырожден (нулевая норма или дисперсия)"""


class ZeroCoefficient(SymfilterError):
    """Относительный интервал для нулевого коэффициента вырождается"""


class NotSolvable(SymfilterError):
    """Уравнение не относится к поддерживаемым законам сохранения"""


class GridFormatError(SymfilterError):
    """Файл PDEGRID1 повреждён или имеет неверный формат"""


class ShapeMismatch(SymfilterError):
    """Размеры сравниваемых массивов или траекторий не согласованы"""
