# /symbolic/__init__.py
