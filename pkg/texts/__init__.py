# -*- coding: utf-8 -*-
"""
Тексты командной строки: описание программы, справка по командам и
заголовки колонок отчётов.
"""

# === Программа ===
PROG_DESCRIPTION = (
    "Канонизация и токенизация символьных уравнений в частных производных, "
    "решатель законов сохранения и фильтр частиц для уточнения коэффициентов."
)
PROG_EPILOG = (
    "Коды выхода: 0 - успех, 1 - ошибка использования, 2 - ошибка данных, "
    "3 - численный сбой. Ошибки пишутся в stderr одной строкой JSON."
)

# === Глобальные флаги ===
HELP_SEED = "Seed генератора случайных чисел (по умолчанию 0)"
HELP_OUTPUT = "Файл результата; без флага результат печатается в stdout"
HELP_FORMAT = "Формат результата: json или csv"
HELP_THREADS = "Число потоков (по умолчанию SYMFILTER_THREADS)"

# === Символьные команды ===
HELP_PARSE = "Разобрать инфиксное уравнение и напечатать дерево"
HELP_CANON = "Привести уравнение к канонической форме"
HELP_TOKENS = "Сериализовать уравнение в токены выбранного диалекта"
HELP_PERTURB = "Перестановки ветвей и шумовые слагаемые для проверки устойчивости"
HELP_EXPR = "Выражение или уравнение в инфиксной записи"
HELP_IMPLICIT = "Разрешить неявное умножение (2u, u u_x)"
HELP_DIALECT = "Диалект токенов: manual или canonical"
HELP_DECODE = "Декодировать последовательность токенов обратно в уравнение"
HELP_MASK = "Заменить коэффициенты на [?]"
HELP_SWAP_PROB = "Вероятность переставить ветви узла"
HELP_NOISE_PROB = "Вероятность добавить шумовое слагаемое"
HELP_SETTING = "Символьная постановка: manual, swapping, noisy_swapping, canonical, noisy_canonical"

# === Численные команды ===
HELP_SOLVE = "Решить закон сохранения и записать траекторию PDEGRID1"
HELP_GEN = "Сгенерировать набор данных из семейств законов сохранения"
HELP_EQ_FILE = "JSON уравнения (family + coefficients или infix)"
HELP_FAMILY = "Семейство уравнений"
HELP_FAMILIES = "Семейства через запятую"
HELP_SPLIT = "Часть набора: train или test"
HELP_PARAMS = "Число наборов коэффициентов на семейство"
HELP_ICS = "Число начальных условий на набор коэффициентов"
HELP_OUT_DIR = "Каталог для записи набора данных"

# === Фильтр частиц ===
HELP_REFINE = "Уточнить коэффициенты уравнения фильтром частиц"
HELP_OBS = "Наблюдаемая траектория в формате PDEGRID1"
HELP_PARTICLES = "Число частиц"
HELP_STEPS = "Число шагов уточнения"
HELP_PROCESS_VAR = "Дисперсия случайного блуждания коэффициентов"
HELP_OBS_SCALE = "Шум наблюдений относительно ||u0||_2"
HELP_LIKELIHOOD = "Правдоподобие: pointwise или field"
HELP_TIMING = "Добавить в результат время работы"

# === Метрики и исследование ===
HELP_EVAL = "Посчитать метрики для найденного уравнения и траекторий"
HELP_TRUTH = "JSON истинного уравнения"
HELP_LEARNED = "Найденное уравнение в инфиксной записи"
HELP_PRED = "Предсказанная траектория в формате PDEGRID1"
HELP_STUDY = "Сравнить ошибки с фильтром и без на семействах уравнений"
HELP_TRIALS = "Число испытаний на семейство"
HELP_COEFF_ERROR = "Относительная ошибка начальных коэффициентов"
HELP_CURVES = "CSV-файл с ESS и разбросом ансамбля по шагам"

# === Настройки ===
HELP_SETTINGS = "Показать или изменить файл настроек"
HELP_SETTINGS_GET = "Путь к настройке через точку, например families.burgers.q1"
HELP_SETTINGS_SET = "Путь к настройке, которую нужно изменить"
HELP_SETTINGS_VALUE = "Новое значение в JSON (0.25, [0.1, 1.0]); текст без кавычек считается строкой"

# === Заголовки колонок отчёта исследования ===
STUDY_COLUMNS = {
    "family": "Семейство",
    "type": "Тип",
    "expression": "Выражение",
    "symbolic_without": "Символьная ошибка без фильтра, %",
    "symbolic_with": "Символьная ошибка с фильтром, %",
    "series_without": "Ошибка ряда без фильтра, %",
    "series_with": "Ошибка ряда с фильтром, %",
    "trials": "Испытаний",
}
